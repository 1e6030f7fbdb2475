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

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "revstack/error.hpp"
#include "revstack/synthesis.hpp"

namespace revstack {
namespace {

using testing::mat;
using testing::point;
using testing::vec;

const DecisionPoint kDesired1 = point({vec({2}), vec({1}), vec({3})});

// <grad J2(d), (gamma(y) - d1, y - yd)> for the two-dimensional leader game,
// with grad J2(d) = (-5, -3, 2, -1) worked out by hand.
double ex3_plane_residual(const AffineStrategy& s, double b, double c) {
  const std::vector<Vector> lower{vec({b}), vec({c})};
  const Vector u1 = s.evaluate(lower);
  return -5 * (u1[0] + 2.5) - 3 * (u1[1] + 1.5) + 2 * (b + 0.5) - 1 * (c + 0.5);
}

std::vector<Matrix> random_params(const StrategyFamily& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<Matrix> t;
  for (const auto& r : f.particular) {
    Matrix m(f.parameter_rows(), r.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    t.push_back(m);
  }
  return t;
}

TEST_CASE("rank-one leader strategy of the scalar game") {
  for (const auto& g : {testing::example1_quadratic(), testing::example1_mixed(), testing::example1_expr()}) {
    const auto s = synthesize_single_leader(g, kDesired1);
    REQUIRE(s.coeffs.size() == 2);
    CHECK(std::abs(s.coeffs[0](0, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(s.coeffs[1](0, 0) - 3.0) <= 1e-12);
    CHECK(std::abs(s.offset()[0] - 12.0) <= 1e-12);
    CHECK(s.realization_residual() <= 1e-12);
    const std::vector<Vector> y{vec({0}), vec({0})};
    CHECK(s.evaluate(y)[0] == doctest::Approx(12.0));
  }
}

TEST_CASE("follower already optimal in the lower variables gives a constant strategy") {
  auto g = testing::example1_expr();
  // Gradient (2, 0, 0) at the desired point.
  g.objectives[1] = Objective(g.dims, ExprObjective{testing::add(
                                          {testing::sq(testing::sub(testing::x(0), testing::k(1))),
                                           testing::sq(testing::sub(testing::x(1), testing::k(1))),
                                           testing::sq(testing::sub(testing::x(2), testing::k(3)))})});
  const auto s = synthesize_single_leader(g, kDesired1);
  CHECK(s.coeffs[0].norm() == 0.0);
  CHECK(s.coeffs[1].norm() == 0.0);
  const std::vector<Vector> y{vec({-7}), vec({40})};
  CHECK(s.evaluate(y)[0] == 2.0);
}

TEST_CASE("rank-one leader strategy of the two-dimensional leader game") {
  const auto s = synthesize_single_leader(testing::example3(), testing::ex3_desired());
  CHECK((s.coeffs[0] - mat({{-5}, {-3}}) * (2.0 / 34)).norm() <= 1e-12);
  CHECK((s.coeffs[1] - mat({{-5}, {-3}}) * (-1.0 / 34)).norm() <= 1e-12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(ex3_plane_residual(s, u(rng), u(rng))) <= 1e-9);
}

TEST_CASE("leader synthesis refuses when the follower ignores the leader") {
  auto g = testing::example1_expr();
  g.objectives[1] = Objective(g.dims, ExprObjective{testing::add({testing::sq(testing::x(1)),
                                                                  testing::sq(testing::x(2))})});
  try {
    synthesize_single_leader(g, kDesired1);
    FAIL("expected SynthesisError");
  } catch (const SynthesisError& e) {
    CHECK(e.level() == 0);
    CHECK_FALSE(e.condition().empty());
  }
}

TEST_CASE("middle strategy of the scalar game") {
  const auto g = testing::example1_expr();
  const auto leader = synthesize_single_leader(g, kDesired1);
  const auto ub = reduced_gradients(g, leader, kDesired1);
  REQUIRE(ub.ubar.size() == 2);
  CHECK(ub.ubar[0][0] == doctest::Approx(-6.0));
  CHECK(ub.ubar[1][0] == doctest::Approx(-6.0));
  const auto m = synthesize_single_middle(g, leader, kDesired1);
  CHECK(m.level == 1);
  CHECK(std::abs(m.coeffs[0](0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(m.offset()[0] - 4.0) <= 1e-12);
}

TEST_CASE("middle strategy is refused when the reduced gradient vanishes") {
  auto g = testing::example1_expr();
  // J3 minimized at the desired point: gradient zero there.
  g.objectives[2] = Objective(g.dims, ExprObjective{testing::add(
                                          {testing::sq(testing::sub(testing::x(0), testing::k(2))),
                                           testing::sq(testing::sub(testing::x(1), testing::k(1))),
                                           testing::sq(testing::sub(testing::x(2), testing::k(3)))})});
  const auto leader = synthesize_single_leader(g, kDesired1);
  CHECK_THROWS_AS(synthesize_single_middle(g, leader, kDesired1), SynthesisError);
}

TEST_CASE("leader family of the two-dimensional leader game") {
  const auto g = testing::example3();
  const auto d = testing::ex3_desired();
  const auto f = synthesize_family_leader(g, d);
  REQUIRE(f.null_basis.cols() == 1);
  CHECK(std::abs(vec({-5, -3}).dot(f.null_basis.col(0))) <= 1e-12);
  CHECK((f.null_basis.transpose() * f.null_basis - Matrix::Identity(1, 1)).norm() <= 1e-12);
  const Vector dir = vec({3, -5}) / std::sqrt(34.0);
  CHECK(std::abs(std::abs(dir.dot(f.null_basis.col(0))) - 1.0) <= 1e-12);

  const auto zero = instantiate(f, f.zero_parameters());
  const auto single = synthesize_single_leader(g, d);
  for (size_t j = 0; j < 2; ++j) CHECK((zero.coeffs[j] - single.coeffs[j]).norm() <= 1e-12);
}

TEST_CASE("scalar leader family is a single point") {
  const auto f = synthesize_family_leader(testing::example1_expr(), kDesired1);
  CHECK(f.null_basis.cols() == 0);
  CHECK(f.parameter_rows() == 0);
  const auto s = instantiate(f, f.zero_parameters());
  CHECK(std::abs(s.coeffs[1](0, 0) - 3.0) <= 1e-12);
}

TEST_CASE("the fixed-parameter member belongs to the family") {
  const auto f = synthesize_family_leader(testing::example3(), testing::ex3_desired());
  const auto coeffs = testing::ex4_coeffs();
  const auto m = family_membership(f, coeffs);
  CHECK(m.residual <= 1e-9);
  const auto s = instantiate(f, m.params);
  for (size_t j = 0; j < 2; ++j) CHECK((s.coeffs[j] - coeffs[j]).norm() <= 1e-9);
  // u1 = ((2 u2 - u3 - 12)/5, -3/2)
  const std::vector<Vector> y{vec({0.7}), vec({-1.9})};
  const Vector u1 = s.evaluate(y);
  CHECK(u1[0] == doctest::Approx((2 * 0.7 + 1.9 - 12) / 5));
  CHECK(u1[1] == doctest::Approx(-1.5));
}

TEST_CASE("coefficients off the hyperplane are not members") {
  const auto f = synthesize_family_leader(testing::example3(), testing::ex3_desired());
  const std::vector<Matrix> off{mat({{1}, {1}}), mat({{0}, {0}})};
  CHECK(family_membership(f, off).residual > 1e-3);
}

TEST_CASE("random members lie on the follower hyperplane") {
  const auto g = testing::example3();
  const auto d = testing::ex3_desired();
  const auto f = synthesize_family_leader(g, d);
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 10; ++k) {
    const auto s = instantiate(f, random_params(f, rng));
    CHECK(s.realization_residual() <= 1e-12);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::abs(ex3_plane_residual(s, u(rng), u(rng))));
    CHECK(worst <= 1e-9);
    const auto hc = hyperplane_membership(g, s, d, 100, static_cast<std::uint64_t>(k));
    CHECK(hc.passed);
    CHECK(hc.samples == 100);
  }
}

TEST_CASE("constructed family and the parameterized written family coincide") {
  const auto f = synthesize_family_leader(testing::example3(), testing::ex3_desired());
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int k = 0; k < 10; ++k) {
    const auto written = testing::ex3_written_family(u(rng), u(rng));
    CHECK(family_membership(f, written).residual <= 1e-9);
  }
  for (int k = 0; k < 10; ++k) {
    const auto s = instantiate(f, random_params(f, rng));
    // Read t1, t2 off the second rows, then compare the whole matrices.
    const double t1 = -s.coeffs[0](1, 0);
    const double t2 = -s.coeffs[1](1, 0);
    const auto written = testing::ex3_written_family(t1, t2);
    CHECK((written[0] - s.coeffs[0]).norm() <= 1e-9);
    CHECK((written[1] - s.coeffs[1]).norm() <= 1e-9);
  }
}

TEST_CASE("instantiate checks parameter shapes") {
  const auto f = synthesize_family_leader(testing::example3(), testing::ex3_desired());
  const std::vector<Matrix> bad{Matrix::Zero(2, 1), Matrix::Zero(1, 1)};
  CHECK_THROWS_AS(instantiate(f, bad), DimensionError);
  const std::vector<Matrix> few{Matrix::Zero(1, 1)};
  CHECK_THROWS_AS(instantiate(f, few), DimensionError);
}

TEST_CASE("parameter selection") {
  const auto f = synthesize_family_leader(testing::example3(), testing::ex3_desired());
  const auto z = select_parameters(f, MinFrobenius{});
  for (const auto& t : z) CHECK(t.norm() == 0.0);

  const auto target = family_membership(f, testing::ex4_coeffs()).params;
  CustomScore by_distance;
  for (double a : {-1.0, 0.0, 1.0}) {
    by_distance.grid.push_back({Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, a)});
  }
  by_distance.grid.push_back(target);
  by_distance.grid.push_back({Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, -2.0)});
  const auto want = testing::ex4_coeffs();
  by_distance.score = [&](const AffineStrategy& s, const std::vector<Matrix>&) {
    return (s.coeffs[0] - want[0]).norm() + (s.coeffs[1] - want[1]).norm();
  };
  const auto best = select_parameters(f, by_distance);
  CHECK((best[0] - target[0]).norm() == 0.0);
  CHECK((best[1] - target[1]).norm() == 0.0);

  CustomScore flat{by_distance.grid, [](const AffineStrategy&, const std::vector<Matrix>&) { return 1.0; }};
  const auto first = select_parameters(f, flat);
  CHECK(first[0](0, 0) == -1.0);

  CHECK_THROWS_AS(select_parameters(f, CustomScore{{}, flat.score}), std::invalid_argument);
}

TEST_CASE("reduction composes followers with the leader strategy") {
  SUBCASE("scalar game, expression followers") {
    const auto g = testing::example1_expr();
    const auto leader = synthesize_single_leader(g, kDesired1);
    const auto r = reduce_problem(g, leader);
    CHECK(r.levels() == 2);
    CHECK(r.first_level == 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 100; ++i) {
      const double b = u(rng), c = u(rng);
      const auto p = point({vec({b}), vec({c})});
      const double a = -b - 3 * c + 12;
      CHECK(evaluate(r.objectives[1], p) == doctest::Approx(testing::ex1_j3(a, b, c)).epsilon(1e-12));
      CHECK(evaluate(r.objectives[0], p) == doctest::Approx(testing::ex1_j2(a, b, c)).epsilon(1e-12));
    }
  }
  SUBCASE("fixed-parameter member of the two-dimensional leader game") {
    const auto g = testing::example3();
    const auto d = testing::ex3_desired();
    const auto leader = AffineStrategy::from_offset(0, d, vec({-12.0 / 5, -1.5}), testing::ex4_coeffs());
    const auto r = reduce_problem(g, leader);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 100; ++i) {
      const double b = u(rng), c = u(rng);
      const double a1 = (2 * b - c - 12) / 5;
      const auto p = point({vec({b}), vec({c})});
      const double j2 = a1 * a1 + 2.25 + b * b + c * c + 3 * b;
      const double j3 = a1 * a1 + 2.25 + b * b + c * c;
      CHECK(evaluate(r.objectives[0], p) == doctest::Approx(j2).epsilon(1e-12));
      CHECK(evaluate(r.objectives[1], p) == doctest::Approx(j3).epsilon(1e-12));
    }
  }
  SUBCASE("quadratic closed form matches direct substitution") {
    const Dims d({2, 1, 2});
    const auto rg = testing::random_quadratic_game(d, 31);
    const auto des = DecisionPoint::from_flat(d, vec({0.3, -0.1, 0.7, 1.2, -0.4}));
    const auto leader = AffineStrategy::from_offset(0, des, vec({1, 2}), {mat({{0.5}, {-1}}), mat({{1, 2}, {0, 3}})});
    const auto r = reduce_problem(rg.problem, leader);
    REQUIRE(r.objectives[0].is_quadratic());
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 100; ++i) {
      const Vector y = vec({u(rng), u(rng), u(rng)});
      Vector x(5);
      x.head(2) = vec({1, 2}) - vec({0.5, -1}) * y[0] - mat({{1, 2}, {0, 3}}) * y.tail(2);
      x.tail(3) = y;
      for (int j = 0; j < 2; ++j) {
        const double direct = 0.5 * x.dot(rg.hessians[j + 1] * x) + rg.linears[j + 1].dot(x);
        const double got = evaluate(r.objectives[j], DecisionPoint::from_flat(r.dims, y));
        CHECK(std::abs(got - direct) <= 1e-9 * (1 + std::abs(direct)));
      }
    }
  }
  SUBCASE("constant strategy freezes the leader") {
    const auto g = testing::example1_expr();
    const auto leader = AffineStrategy::from_offset(0, kDesired1, vec({2}), {Matrix::Zero(1, 1), Matrix::Zero(1, 1)});
    const auto r = reduce_problem(g, leader);
    CHECK(evaluate(r.objectives[1], point({vec({-3}), vec({4})})) == doctest::Approx(testing::ex1_j3(2, -3, 4)));
  }
  SUBCASE("constraints are substituted") {
    auto g = testing::example1_quadratic();
    g.constraints = LinearConstraints{{mat({{1}}), mat({{0}}), mat({{0}})}, vec({20})};
    const auto leader = synthesize_single_leader(g, kDesired1);
    const auto r = reduce_problem(g, leader);
    REQUIRE(r.constraints.has_value());
    // u1 <= 20 becomes -u2 - 3u3 <= 8.
    CHECK(r.constraints->a_blocks[0](0, 0) == doctest::Approx(-1.0));
    CHECK(r.constraints->a_blocks[1](0, 0) == doctest::Approx(-3.0));
    CHECK(r.constraints->b[0] == doctest::Approx(8.0));
  }
}

TEST_CASE("reduction preconditions") {
  const Dims d({1, 1});
  GameProblem two{d, {Objective(d, ExprObjective{testing::x(0)}), Objective(d, ExprObjective{testing::x(1)})}, std::nullopt};
  const auto s = AffineStrategy::from_offset(0, point({vec({0}), vec({0})}), vec({0}), {Matrix::Zero(1, 1)});
  CHECK_THROWS_AS(reduce_problem(two, s), std::invalid_argument);
}

TEST_CASE("cascade on the scalar game") {
  const auto c = synthesize_cascade(testing::example1_quadratic());
  REQUIRE(c.size() == 2);
  CHECK(std::abs(c[0].offset()[0] - 12.0) <= 1e-9);
  CHECK(std::abs(c[0].coeffs[0](0, 0) - 1.0) <= 1e-9);
  CHECK(std::abs(c[0].coeffs[1](0, 0) - 3.0) <= 1e-9);
  CHECK(c[1].level == 1);
  CHECK(std::abs(c[1].offset()[0] - 4.0) <= 1e-9);
  CHECK(std::abs(c[1].coeffs[0](0, 0) - 1.0) <= 1e-9);
}

TEST_CASE("cascade equals leader plus middle synthesis") {
  const Dims d({2, 2, 1});
  const auto rg = testing::random_quadratic_game(d, 77);
  const auto des = testing::team_optimum_desired(rg);
  const auto c = synthesize_cascade(rg.problem, des);
  const auto leader = synthesize_single_leader(rg.problem, des);
  const auto middle = synthesize_single_middle(rg.problem, leader, des);
  REQUIRE(c.size() == 2);
  for (size_t j = 0; j < 2; ++j) CHECK((c[0].coeffs[j] - leader.coeffs[j]).norm() <= 1e-9);
  CHECK((c[1].coeffs[0] - middle.coeffs[0]).norm() <= 1e-9);
}

TEST_CASE("cascade on a bilevel game") {
  const Dims d({1, 2});
  const auto rg = testing::random_quadratic_game(d, 3);
  const auto des = testing::team_optimum_desired(rg);
  const auto c = synthesize_cascade(rg.problem, des);
  REQUIRE(c.size() == 1);
  const Vector g = rg.hessians[1] * des.flatten() + rg.linears[1];
  const Matrix want = g.head(1) * g.tail(2).transpose() / g.head(1).squaredNorm();
  CHECK((c[0].coeffs[0] - want).norm() <= 1e-9);
}

TEST_CASE("cascade with a fixed top strategy") {
  const auto g = testing::example3();
  const auto d = testing::ex3_desired();
  const auto top = AffineStrategy::from_offset(0, d, vec({-12.0 / 5, -1.5}), testing::ex4_coeffs());
  const auto c = synthesize_cascade(g, d, top);
  REQUIRE(c.size() == 2);
  const std::vector<Vector> y{vec({-0.5})};
  CHECK(std::abs(c[1].evaluate(y)[0] + 0.5) <= 1e-9);
}

TEST_CASE("cascade names the failing stage") {
  auto g = testing::example1_expr();
  g.objectives[2] = Objective(g.dims, ExprObjective{testing::add(
                                          {testing::sq(testing::sub(testing::x(0), testing::k(2))),
                                           testing::sq(testing::sub(testing::x(1), testing::k(1))),
                                           testing::sq(testing::sub(testing::x(2), testing::k(3)))})});
  try {
    synthesize_cascade(g, kDesired1);
    FAIL("expected SynthesisError");
  } catch (const SynthesisError& e) {
    CHECK(e.level() == 1);
  }
}

TEST_CASE("strategies round trip through offset form") {
  const auto d = testing::ex3_desired();
  const auto s = AffineStrategy::from_offset(0, d, vec({-12.0 / 5, -1.5}), testing::ex4_coeffs());
  CHECK(s.realization_residual() <= 1e-12);
  CHECK((s.offset() - vec({-12.0 / 5, -1.5})).norm() <= 1e-12);
  const auto shifted = AffineStrategy::from_offset(0, d, vec({-2, -1.5}), testing::ex4_coeffs());
  CHECK(shifted.realization_residual() == doctest::Approx(0.4));
  CHECK_THROWS_AS(s.check(Dims({1, 1, 1})), DimensionError);
  CHECK_NOTHROW(s.check(testing::ex3_dims()));
}

}  // namespace
}  // namespace revstack
