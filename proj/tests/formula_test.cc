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
#include "revstack/error.hpp"
#include "revstack/formula.hpp"

namespace revstack {
namespace {

using testing::k;
using testing::x;

int error_column(const std::string& text, const std::optional<Dims>& dims = std::nullopt) {
  try {
    parse_formula(text, dims);
  } catch (const ParseError& e) {
    return e.column();
  }
  return -1;
}

TEST_CASE("precedence and associativity") {
  // ^ binds tighter than unary minus, which binds tighter than *.
  CHECK(parse_formula("-u1^2") == Expr::negate(Expr::power(x(0), 2)));
  CHECK(parse_formula("2*u1^3") == Expr::product({k(2), Expr::power(x(0), 3)}));
  CHECK(parse_formula("u1 - u2") == Expr::sum({x(0), Expr::negate(x(1))}));
  CHECK(parse_formula("-3*u1") == Expr::product({k(-3), x(0)}));
  CHECK(parse_formula("-3^2") == Expr::negate(Expr::power(k(3), 2)));
  CHECK(parse_formula("u1^2^2") == Expr::power(x(0), 4));
  CHECK(parse_formula("(u1 + 1)*(u2 - 1)") ==
        Expr::product({Expr::sum({x(0), k(1)}), Expr::sum({x(1), Expr::negate(k(1))})}));
  CHECK(parse_formula("u2_3", Dims({1, 4})) == x(1, 2));
}

TEST_CASE("the two-dimensional leader objective parses to the expected tree") {
  const Dims d = testing::ex3_dims();
  const Expr got = parse_formula(
      "(u1_1)^2 + (u1_2)^2 + (u2)^2 + (u3)^2 + 5*u1_1 + 3*u1_2 + u2 + u3", d);
  const Expr want = Expr::sum({Expr::power(x(0, 0), 2), Expr::power(x(0, 1), 2), Expr::power(x(1), 2),
                               Expr::power(x(2), 2), Expr::product({k(5), x(0, 0)}),
                               Expr::product({k(3), x(0, 1)}), x(1), x(2)});
  CHECK(got == want);
  const Vector p = testing::vec({0.25, -1.5, 3.0, -2.0});
  CHECK(evaluate_expr(got, d, {p.data(), 4}) == doctest::Approx(testing::ex3_j1(0.25, -1.5, 3.0, -2.0)));
}

TEST_CASE("variables outside the game are rejected with their column") {
  const Dims d({1, 1, 1});
  CHECK_THROWS_AS(parse_formula("u1 + u4_1", d), UnknownVariableError);
  CHECK(error_column("u1 + u4_1", d) == 6);
  CHECK_THROWS_AS(parse_formula("u1_2", d), UnknownVariableError);
  CHECK_THROWS_AS(parse_formula("u1", Dims({2, 1})), UnknownVariableError);
  CHECK_THROWS_AS(parse_formula("u0"), UnknownVariableError);
}

TEST_CASE("syntax errors carry the column") {
  CHECK_THROWS_AS(parse_formula("u1 + * 2"), SyntaxError);
  CHECK(error_column("u1 + * 2") == 6);
  CHECK(error_column("(u1 + 2") == 8);
  CHECK(error_column("u1 $ 2") == 4);
  CHECK(error_column("u1^0") == 4);
  CHECK(error_column("u1^2.5") == 4);
  CHECK(error_column("u1^1001") == 4);
  CHECK(error_column("u1^-2") == 4);
  CHECK(error_column("ux") == 2);
  CHECK(error_column("") == 1);
  CHECK_THROWS_AS(parse_formula("u1 u2"), SyntaxError);
}

TEST_CASE("printing uses explicit indices and minimal parentheses") {
  CHECK(print_formula(parse_formula("(u1 - 1)^2 + u2^2")) == "(u1_1 - 1)^2 + u2_1^2");
  CHECK(print_formula(parse_formula("-(u1 + u2)")) == "-(u1_1 + u2_1)");
  CHECK(print_formula(parse_formula("2*(u1*u2)")) == "2*(u1_1*u2_1)");
  CHECK(print_formula(Expr::power(k(-2), 3)) == "(-2)^3");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e22) == "1e+22");
}

// Random trees over the factories, including shapes the parser can only
// produce through parentheses.
Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  std::uniform_real_distribution<double> val(-5, 5);
  std::uniform_int_distribution<int> small(0, 2);
  switch (pick(rng)) {
    case 0: {
      const double v = std::round(val(rng) * 1000) / 8.0;
      return k(small(rng) == 0 ? v * 1e-7 : v);
    }
    case 1:
      return x(small(rng), small(rng));
    case 2: {
      std::vector<Expr> kids;
      const int n = 2 + small(rng);
      for (int i = 0; i < n; ++i) {
        Expr c = random_tree(rng, depth - 1);
        kids.push_back(i > 0 && small(rng) == 0 ? Expr::negate(std::move(c)) : std::move(c));
      }
      return Expr::sum(std::move(kids));
    }
    case 3: {
      std::vector<Expr> kids;
      const int n = 2 + small(rng);
      for (int i = 0; i < n; ++i) kids.push_back(random_tree(rng, depth - 1));
      return Expr::product(std::move(kids));
    }
    case 4:
      return Expr::power(random_tree(rng, depth - 1), 1 + small(rng));
    default:
      return Expr::negate(random_tree(rng, depth - 1));
  }
}

TEST_CASE("print then parse reproduces random trees") {
  std::mt19937_64 rng(314);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_tree(rng, 4);
    const std::string s = print_formula(e);
    INFO(s);
    const Expr back = parse_formula(s);
    CHECK(back == e);
    CHECK(print_formula(back) == s);
  }
}

}  // namespace
}  // namespace revstack
