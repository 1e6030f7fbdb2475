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

#include "oracles.hpp"
#include "revstack/error.hpp"
#include "revstack/geometry.hpp"
#include "revstack/synthesis.hpp"

namespace revstack {
namespace {

using testing::point;
using testing::vec;

const DecisionPoint kDesired1 = point({vec({2}), vec({1}), vec({3})});

TEST_CASE("supporting hyperplanes of the scalar game followers") {
  const auto g = testing::example1_expr();
  const auto h2 = supporting_hyperplane_at(g.objectives[1], kDesired1);
  CHECK((h2.normal.flatten() - vec({2, 2, 6})).norm() == 0.0);
  CHECK(h2.signed_distance(kDesired1) == 0.0);
  // 2(u1-2) + 2(u2-1) + 6(u3-3) at (0,0,0) is -24.
  CHECK(h2.signed_distance_flat(vec({0, 0, 0})) == doctest::Approx(-24.0));
  const auto h3 = supporting_hyperplane_at(g.objectives[2], kDesired1);
  CHECK((h3.normal.flatten() - vec({4, -2, 6})).norm() == 0.0);
}

TEST_CASE("zero gradient gives no hyperplane") {
  const Dims d({1, 1});
  const Objective j(d, ExprObjective{testing::add({testing::sq(testing::x(0)), testing::sq(testing::x(1))})});
  CHECK_THROWS_AS(supporting_hyperplane_at(j, DecisionPoint::zeros(d)), ZeroGradientError);
}

TEST_CASE("leader existence") {
  SUBCASE("scalar game passes with block norm 2") {
    const auto v = leader_existence_check(testing::example1_expr(), kDesired1);
    CHECK(v.passed);
    CHECK(v.block_norm == doctest::Approx(2.0));
    REQUIRE(v.convexity.has_value());
    CHECK(*v.convexity == ConvexityVerdict::kCertified);
  }
  SUBCASE("two-dimensional leader passes with block norm sqrt 34") {
    const auto v = leader_existence_check(testing::example3(), testing::ex3_desired());
    CHECK(v.passed);
    CHECK(v.block_norm == doctest::Approx(std::sqrt(34.0)));
  }
  SUBCASE("follower blind to the leader fails") {
    auto g = testing::example1_expr();
    g.objectives[1] = Objective(g.dims, ExprObjective{testing::add({testing::sq(testing::x(1)),
                                                                    testing::sq(testing::x(2))})});
    const auto v = leader_existence_check(g, kDesired1);
    CHECK_FALSE(v.passed);
    CHECK(v.block_norm == 0.0);
    CHECK_FALSE(v.condition.empty());
    CHECK_FALSE(v.reason.empty());
  }
}

TEST_CASE("existence verdict is scale equivariant") {
  auto g = testing::example1_expr();
  for (double c : {1e-6, 1.0, 1e6}) {
    g.objectives[1] = Objective(g.dims, ExprObjective{testing::mul(testing::k(c), testing::ex1_j2_expr())});
    CHECK(leader_existence_check(g, kDesired1, 0.0).passed);
  }
}

TEST_CASE("middle existence after substituting the leader strategy") {
  SUBCASE("scalar game") {
    const auto g = testing::example1_expr();
    const auto leader = synthesize_single_leader(g, kDesired1);
    const auto reduced = reduce_problem(g, leader);
    const auto v = middle_existence_check(reduced.objectives[1], kDesired1.tail(1));
    CHECK(v.passed);
    // d/du2 of (-u2 - 3u3 + 12)^2 + (u2-2)^2 + u3^2 at (1,3) is -2*2 + 2*(-1) = -6.
    CHECK(v.block_norm == doctest::Approx(6.0));
  }
  SUBCASE("two-dimensional leader, fixed member") {
    const auto g = testing::example3();
    const auto d = testing::ex3_desired();
    const auto leader = AffineStrategy::from_offset(
        0, d, vec({-12.0 / 5, -1.5}), testing::ex4_coeffs());
    const auto reduced = reduce_problem(g, leader);
    const auto v = middle_existence_check(reduced.objectives[1], d.tail(1));
    CHECK(v.passed);
    // d/du2 of ((2u2-u3-12)/5)^2 + 9/4 + u2^2 + u3^2 at (-1/2,-1/2): 2*(-2.5)*(2/5) - 1 = -3.
    CHECK(v.block_norm == doctest::Approx(3.0));
  }
  SUBCASE("reduced follower blind to the middle level fails") {
    const Dims d({1, 1});
    const Objective j(d, ExprObjective{testing::sq(testing::x(1))});
    CHECK_FALSE(middle_existence_check(j, point({vec({0.5}), vec({1})})).passed);
  }
}

TEST_CASE("exposed point probe") {
  const auto g = testing::example1_expr();
  SUBCASE("convex follower is consistent") {
    const auto probe = make_probe(g.objectives[1], kDesired1);
    CHECK(probe.threshold == evaluate(g.objectives[1], kDesired1));
    const auto plane = supporting_hyperplane_at(g.objectives[1], kDesired1);
    const auto r = exposed_point_probe(probe, plane, BallSampler{10000, 5.0, 1});
    CHECK(r.verdict == ProbeVerdict::kConsistent);
    CHECK(r.samples == 10000);
    CHECK(r.samples_in_set > 0);
    CHECK(r.violations == 0);
  }
  SUBCASE("anchor inside a concave sublevel set is refuted") {
    const Dims d({1, 1, 1});
    const Objective neg(d, ExprObjective{Expr::negate(testing::add(
                               {testing::sq(testing::x(0)), testing::sq(testing::x(1)), testing::sq(testing::x(2))}))});
    const auto probe = make_probe(neg, kDesired1);
    const auto plane = supporting_hyperplane_at(neg, kDesired1);
    const auto r = exposed_point_probe(probe, plane, BallSampler{2000, 1.0, 2});
    CHECK(r.verdict == ProbeVerdict::kRefuted);
    CHECK(r.violations > 0);
    REQUIRE(r.witness.has_value());
    CHECK(plane.signed_distance(*r.witness) >= 0.0);
    CHECK(evaluate(neg, *r.witness) <= probe.threshold);
  }
  SUBCASE("degenerate quartic is rejected before probing") {
    const Dims d({1, 1, 1});
    const Objective w(d, ExprObjective{testing::add({testing::sq(testing::sub(testing::sq(testing::x(0)), testing::k(1))),
                                                     testing::sq(testing::x(1)), testing::sq(testing::x(2))})});
    CHECK_THROWS_AS(supporting_hyperplane_at(w, point({vec({1}), vec({0}), vec({0})})),
                    ZeroGradientError);
  }
}

TEST_CASE("convex sublevel sets lie on one side of the gradient hyperplane") {
  const Dims d({2, 1, 1});
  const auto rg = testing::random_quadratic_game(d, 17);
  const auto p = DecisionPoint::from_flat(d, vec({0.4, -0.2, 1.1, -0.9}));
  const auto probe = make_probe(rg.problem.objectives[1], p);
  const auto plane = supporting_hyperplane_at(rg.problem.objectives[1], p);
  BallStream stream(p.flatten(), 3.0, 5, RadialLaw::kMultiScale);
  int in_set = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vector x = stream.next();
    const Vector dx = x - p.flatten();
    const double j = 0.5 * x.dot(rg.hessians[1] * x) + rg.linears[1].dot(x);
    if (j <= probe.threshold) {
      ++in_set;
      CHECK(plane.signed_distance_flat(x) <= 1e-9);
    }
    CHECK(dx.norm() <= 3.0 + 1e-12);
  }
  CHECK(in_set > 0);
}

TEST_CASE("ball streams are reproducible") {
  BallStream a(vec({1, 2}), 2.0, 9, RadialLaw::kUniform);
  BallStream b(vec({1, 2}), 2.0, 9, RadialLaw::kUniform);
  for (int i = 0; i < 50; ++i) CHECK(a.next() == b.next());
}

}  // namespace
}  // namespace revstack
