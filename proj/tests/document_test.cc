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

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "revstack/document.hpp"
#include "revstack/error.hpp"
#include "revstack/formula.hpp"

namespace revstack {
namespace {

using testing::vec;

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(REVSTACK_TEST_DATA) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class E>
E parse_error(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const E& e) {
    return e;
  } catch (const std::exception& e) {
    FAIL("wrong exception: " << e.what());
  }
  FAIL("no exception");
  return E("unreachable");
}

TEST_CASE("the scalar game document") {
  const auto g = parse_problem(slurp("example1.json"));
  CHECK(g.levels() == 3);
  CHECK_FALSE(has_errors(validate(g)));
  CHECK(g.objectives[0].is_quadratic());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 50; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const auto p = testing::point({vec({a}), vec({b}), vec({c})});
    CHECK(evaluate(g.objectives[0], p) == doctest::Approx(testing::ex1_j1(a, b, c)));
    CHECK(evaluate(g.objectives[1], p) == doctest::Approx(testing::ex1_j2(a, b, c)));
    CHECK(evaluate(g.objectives[2], p) == doctest::Approx(testing::ex1_j3(a, b, c)));
  }
}

TEST_CASE("write then parse is idempotent") {
  for (const char* name : {"example1.json", "example3.json", "constrained1.json"}) {
    const auto g = parse_problem(slurp(name));
    const std::string once = write_problem(g);
    const std::string twice = write_problem(parse_problem(once));
    CHECK(once == twice);
  }
}

TEST_CASE("malformed JSON reports line and column") {
  const auto e = parse_error<SyntaxError>("{\n  \"levels\": 3,\n  \"dims\": [1, 1 1]\n}");
  CHECK(e.line() == 3);
  CHECK(e.column() > 0);
}

TEST_CASE("unknown formula variables report the JSON path and formula column") {
  const auto e = parse_error<UnknownVariableError>(R"({"levels": 3, "dims": [1, 1, 1],
    "objectives": [{"type": "expr", "formula": "u1^2"},
                   {"type": "expr", "formula": "u2 + u4_1"},
                   {"type": "expr", "formula": "u3"}]})");
  CHECK(e.path() == "$.objectives[1].formula");
  CHECK(e.column() == 6);
}

TEST_CASE("shape mismatches are their own error class") {
  const auto e = parse_error<ShapeMismatchError>(R"({"levels": 2, "dims": [1, 2],
    "objectives": [{"type": "quadratic", "A": {"1,2": [[1, 2, 3]]}},
                   {"type": "expr", "formula": "u1"}]})");
  CHECK(e.path() == "$.objectives[0].A[\"1,2\"]");
  CHECK_THROWS_AS(parse_problem(R"({"levels": 2, "dims": [1], "objectives": []})"), ShapeMismatchError);
  CHECK_THROWS_AS(parse_problem(R"({"levels": 2, "dims": [1, 1],
    "objectives": [{"type": "expr", "formula": "u1"}, {"type": "expr", "formula": "u2"}],
    "constraints": {"A": [[[1]], [[1], [2]]], "b": [1]}})"),
                  ShapeMismatchError);
}

TEST_CASE("unknown keys and wrong types are syntax errors") {
  CHECK_THROWS_AS(parse_problem(R"({"levels": 2, "dims": [1, 1], "objectives": [], "extra": 1})"), SyntaxError);
  CHECK_THROWS_AS(parse_problem(R"({"levels": "two", "dims": [1, 1], "objectives": []})"), SyntaxError);
  CHECK_THROWS_AS(parse_problem(R"({"levels": 2, "dims": [1, 1],
    "objectives": [{"type": "cubic"}, {"type": "expr", "formula": "u1"}]})"),
                  SyntaxError);
}

TEST_CASE("strategy documents") {
  const Dims d({1, 1, 1});
  const auto s = parse_strategies(
      R"({"strategies": [{"level": 2, "offset": [4], "coeffs": {"3": [[1]]}},
                         {"level": 1, "offset": [12], "coeffs": {"2": [[1]], "3": [[3]]}}]})",
      d);
  REQUIRE(s.size() == 2);
  CHECK(s[0].level == 0);
  CHECK(s[0].coeffs[1](0, 0) == 3.0);
  CHECK(s[1].offset[0] == 4.0);

  const auto partial = parse_strategies(R"({"strategies": [{"level": 1, "offset": [12], "coeffs": {"3": [[3]]}}]})", d);
  CHECK(partial[0].coeffs[0](0, 0) == 0.0);

  CHECK_THROWS_AS(parse_strategies(R"({"strategies": [{"level": 3, "offset": [1]}]})", d), ParseError);
  CHECK_THROWS_AS(parse_strategies(R"({"strategies": [{"level": 1, "offset": [1, 2]}]})", d), ShapeMismatchError);
  CHECK_THROWS_AS(parse_strategies(R"({"strategies": [{"level": 1}]})", d), SyntaxError);
  CHECK_THROWS_AS(parse_strategies("{\"strategies\": [", d), SyntaxError);
}

TEST_CASE("strategies round trip through their document") {
  const auto des = testing::ex3_desired();
  const std::vector<AffineStrategy> s{
      AffineStrategy::from_offset(0, des, vec({-2.4, -1.5}), testing::ex4_coeffs()),
      AffineStrategy::from_offset(1, des, vec({-0.5}), {Matrix::Zero(1, 1)})};
  const auto back = parse_strategies(write_strategies(s), testing::ex3_dims());
  REQUIRE(back.size() == 2);
  CHECK((back[0].offset - s[0].offset()).norm() <= 1e-15);
  CHECK((back[0].coeffs[0] - s[0].coeffs[0]).norm() == 0.0);
  CHECK(back[1].level == 1);
}

TEST_CASE("matrix lists") {
  const auto m = parse_matrix_list("[[0.1],[0.2]];[[0.3]]");
  REQUIRE(m.size() == 2);
  CHECK(m[0].rows() == 2);
  CHECK(m[1](0, 0) == 0.3);
  CHECK_THROWS_AS(parse_matrix_list("[[1],[2]"), ParseError);
}

}  // namespace
}  // namespace revstack
