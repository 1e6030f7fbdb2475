// Copyright 2026 The revstack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "revstack/synthesis.hpp"
#include "revstack/verify.hpp"

namespace revstack {
namespace {

using testing::mat;
using testing::point;
using testing::vec;

const DecisionPoint kDesired1 = point({vec({2}), vec({1}), vec({3})});

std::vector<AffineStrategy> ex1_strategies(double q1 = 1, double q2 = 3, double offset = 12) {
  return {AffineStrategy::from_offset(0, kDesired1, vec({offset}), {mat({{q1}}), mat({{q2}})}),
          AffineStrategy::from_offset(1, kDesired1, vec({4}), {mat({{1}})})};
}

TEST_CASE("oracle best responses of the scalar game") {
  const auto g = testing::example1_expr();
  const auto s = ex1_strategies();
  GridSpec box;
  box.bounds = {{-10, 12}, {-10, 12}};
  const auto r2 = oracle_best_response(g, std::span(s).first(1), 1, box);
  CHECK(std::abs(r2.point.blocks[0][0] - 1.0) <= 1e-4);
  CHECK(std::abs(r2.point.blocks[1][0] - 3.0) <= 1e-4);
  const auto r3 = oracle_best_response(g, s, 2);
  CHECK(std::abs(r3.point.blocks[0][0] - 3.0) <= 1e-4);
  CHECK(r3.points_per_axis == 41);
  CHECK_FALSE(r3.low_confidence);
}

TEST_CASE("oracle best response under the fixed-parameter member") {
  const auto g = testing::example3();
  const auto d = testing::ex3_desired();
  const std::vector<AffineStrategy> s{
      AffineStrategy::from_offset(0, d, vec({-12.0 / 5, -1.5}), testing::ex4_coeffs())};
  const auto r = oracle_best_response(g, s, 1);
  CHECK(std::abs(r.point.blocks[0][0] + 0.5) <= 1e-4);
  CHECK(std::abs(r.point.blocks[1][0] + 0.5) <= 1e-4);
}

TEST_CASE("oracle is deterministic and thread-count independent") {
  const auto g = testing::example3();
  const auto d = testing::ex3_desired();
  const std::vector<AffineStrategy> s{synthesize_single_leader(g, d)};
  GridSpec one;
  GridSpec many;
  many.threads = 4;
  const auto a = oracle_best_response(g, s, 1, one);
  const auto b = oracle_best_response(g, s, 1, one);
  const auto c = oracle_best_response(g, s, 1, many);
  CHECK(a.point.flatten() == b.point.flatten());
  CHECK(a.point.flatten() == c.point.flatten());
  CHECK(a.grid_point.flatten() == c.grid_point.flatten());
  CHECK(a.value == c.value);
}

TEST_CASE("oracle respects the evaluation budget") {
  const auto g = testing::example3();
  const std::vector<AffineStrategy> s{synthesize_single_leader(g, testing::ex3_desired())};
  GridSpec small;
  small.max_evaluations = 500;
  const auto r = oracle_best_response(g, s, 1, small);
  CHECK(r.points_per_axis * r.points_per_axis <= 500);
  CHECK(r.points_per_axis >= 2);
}

TEST_CASE("oracle matches the closed-form argmin on random convex games") {
  const Dims d({2, 1, 1});
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rg = testing::random_quadratic_game(d, 500 + seed);
    const auto des = testing::team_optimum_desired(rg);
    // Some affine leader map, not necessarily an optimal one.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto leader = AffineStrategy::from_offset(
        0, des, vec({u(rng), u(rng)}), {mat({{u(rng)}, {u(rng)}}), mat({{u(rng)}, {u(rng)}})});
    const auto [m, c] = testing::strategy_affine(leader);
    Matrix s = Matrix::Zero(4, 2);
    s.topRows(2) = -m;
    s.bottomRows(2) = Matrix::Identity(2, 2);
    Vector t = Vector::Zero(4);
    t.head(2) = c;
    const Vector want = testing::affine_argmin(rg.hessians[1], rg.linears[1], s, t);
    const Vector center = des.flatten().tail(2);
    if ((want - center).cwiseAbs().maxCoeff() > 9.0) continue;
    ++compared;
    const std::vector<AffineStrategy> ann{leader};
    const auto r = oracle_best_response(rg.problem, ann, 1);
    CHECK((r.point.flatten() - want).norm() <= 1e-4);
  }
  CHECK(compared >= 15);
}

TEST_CASE("lift fills the levels above through the strategies") {
  const auto g = testing::example1_expr();
  const auto s = ex1_strategies();
  const auto p = lift(g, s, 2, point({vec({5})}));
  // u2 = 4 - 5 = -1, u1 = 12 + 1 - 15 = -2
  CHECK((p.flatten() - vec({-2, -1, 5})).norm() <= 1e-12);
}

TEST_CASE("full verification of the scalar game") {
  const auto g = testing::example1_expr();
  const auto s = ex1_strategies();
  const auto r = verify_full(g, s);
  CHECK(r.verified);
  CHECK(r.reasons.empty());
  REQUIRE(r.levels.size() == 2);
  for (const auto& l : r.levels) {
    CHECK(l.realization_ok);
    CHECK(l.hyperplane.passed);
    CHECK(l.argmin_ok);
    CHECK(l.chain_ok);
    CHECK(l.sublevel.violations == 0);
  }
}

TEST_CASE("verification detects a corrupted leader map") {
  const auto g = testing::example1_expr();
  // u1 = -u2 - 2u3 + 11
  const auto s = ex1_strategies(1, 2, 11);
  const auto r = verify_full(g, s);
  CHECK_FALSE(r.verified);
  CHECK_FALSE(r.reasons.empty());
  CHECK_FALSE(r.levels[0].argmin_ok);
  CHECK(r.levels[0].argmin_distance > 1e-2);
}

TEST_CASE("aligned bilevel game is verified with a zero-coefficient strategy") {
  const Dims d({1, 1});
  const Objective j(d, ExprObjective{testing::add({testing::sq(testing::sub(testing::x(0), testing::k(1))),
                                                   testing::sq(testing::sub(testing::x(1), testing::k(-2)))})});
  GameProblem g{d, {j, j}, std::nullopt};
  const auto des = point({vec({1}), vec({-2})});
  const std::vector<AffineStrategy> s{AffineStrategy::from_offset(0, des, vec({1}), {Matrix::Zero(1, 1)})};
  const auto r = verify_full(g, s);
  CHECK(r.verified);
}

TEST_CASE("verification is monotone in the tolerance") {
  const auto g = testing::example3();
  const auto s = synthesize_cascade(g);
  for (double tol : {1e-4, 1e-3, 1e-1}) CHECK(verify_full(g, s, tol).verified);
}

TEST_CASE("sublevel inequality sampling") {
  const auto g = testing::example1_expr();
  const auto probe = make_probe(g.objectives[1], kDesired1);
  SUBCASE("rank-one strategy") {
    const auto s = ex1_strategies()[0];
    const auto st = sublevel_inequality_check(probe, s, BallSampler{10000, 5.0, 3}, 1e-9);
    CHECK(st.samples == 10000);
    CHECK(st.violations == 0);
    CHECK((st.min_point - vec({1, 3})).norm() <= 1e-3);
    CHECK(st.min_value >= st.threshold - 1e-9);
  }
  SUBCASE("strategy off the hyperplane") {
    const auto s = AffineStrategy::from_offset(0, kDesired1, vec({2 + 1 + 2.9 * 3}), {mat({{1}}), mat({{2.9}})});
    CHECK(s.realization_residual() <= 1e-12);
    const auto st = sublevel_inequality_check(probe, s, BallSampler{10000, 5.0, 3}, 1e-9);
    CHECK(st.violations > 0);
    CHECK(st.min_value < st.threshold);
  }
  SUBCASE("constant objective") {
    const Objective flat(g.dims, ExprObjective{testing::k(2.0)});
    const auto p = make_probe(flat, kDesired1);
    const auto st = sublevel_inequality_check(p, ex1_strategies()[0], BallSampler{500, 5.0, 3}, 1e-9);
    CHECK(st.violations == 0);
    CHECK(st.min_value == st.threshold);
  }
}

}  // namespace
}  // namespace revstack
