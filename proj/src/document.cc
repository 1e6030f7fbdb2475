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

#include "revstack/document.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "json_util.hpp"
#include "revstack/error.hpp"
#include "revstack/formula.hpp"

namespace revstack {

namespace {

using detail::Json;

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line and column.
    const size_t upto = std::min<size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    int line = 1, col = 1;
    for (size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw SyntaxError("malformed JSON: " + msg, line, col);
  }
}

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw SyntaxError(msg, 0, 0, path);
}

[[noreturn]] void shape(const std::string& path, const std::string& msg) {
  throw ShapeMismatchError(msg, 0, 0, path);
}

const Json& member(const Json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(path, std::string("missing key \"") + key + "\"");
  return *it;
}

void only_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      bad(path, "unknown key \"" + k + "\"");
    }
  }
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<int>();
}

Vector vector_of(const Json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(v[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

// An empty array is a matrix with no rows and `cols_if_empty` columns.
Matrix matrix_of(const Json& v, const std::string& path, int cols_if_empty = 0) {
  if (!v.is_array()) bad(path, "expected a matrix (array of rows)");
  if (v.empty()) return Matrix(0, cols_if_empty);
  const size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < v.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!v[r].is_array()) bad(rp, "expected a row (array of numbers)");
    if (v[r].size() != cols) shape(rp, "rows have different lengths");
    for (size_t c = 0; c < cols; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number(v[r][c], rp + "[" + std::to_string(c) + "]");
    }
  }
  return out;
}

std::string dims_text(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void expect_shape(const Matrix& m, int rows, int cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols) {
    shape(path, "expected a " + dims_text(rows, cols) + " matrix, got " +
                    dims_text(m.rows(), m.cols()));
  }
}

bool parse_int(std::string_view s, int& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

Objective parse_objective(const Json& o, const Dims& dims, const std::string& path) {
  if (!o.is_object()) bad(path, "expected an objective object");
  const Json& type = member(o, "type", path);
  if (!type.is_string()) bad(path + ".type", "expected \"quadratic\" or \"expr\"");
  const std::string t = type.get<std::string>();
  const int n = dims.levels();
  if (t == "quadratic") {
    only_keys(o, {"type", "A", "l", "constant"}, path);
    QuadraticObjective q;
    if (const auto it = o.find("A"); it != o.end()) {
      if (!it->is_object()) bad(path + ".A", "expected an object keyed \"j,k\"");
      for (const auto& [key, m] : it->items()) {
        const std::string kp = path + ".A[\"" + key + "\"]";
        const auto comma = key.find(',');
        int j = 0, k = 0;
        if (comma == std::string::npos ||
            !parse_int(std::string_view(key).substr(0, comma), j) ||
            !parse_int(std::string_view(key).substr(comma + 1), k)) {
          bad(kp, "block key must look like \"j,k\"");
        }
        if (j < 1 || k < 1 || j > n || k > n) {
          shape(kp, "block key refers to a level outside 1.." + std::to_string(n));
        }
        if (j > k) bad(kp, "block keys need j <= k");
        Matrix a = matrix_of(m, kp, dims.size(k - 1));
        expect_shape(a, dims.size(j - 1), dims.size(k - 1), kp);
        q.blocks[{j - 1, k - 1}] = std::move(a);
      }
    }
    if (const auto it = o.find("l"); it != o.end()) {
      const std::string lp = path + ".l";
      if (!it->is_array() || static_cast<int>(it->size()) != n) {
        shape(lp, "expected one vector per level (" + std::to_string(n) + ")");
      }
      for (int j = 0; j < n; ++j) {
        const std::string vp = lp + "[" + std::to_string(j) + "]";
        Vector v = vector_of((*it)[j], vp);
        if (v.size() != dims.size(j)) {
          shape(vp, "expected " + std::to_string(dims.size(j)) + " entries, got " +
                        std::to_string(v.size()));
        }
        q.linear.push_back(std::move(v));
      }
    }
    if (const auto it = o.find("constant"); it != o.end()) {
      q.constant = number(*it, path + ".constant");
    }
    return Objective(dims, std::move(q));
  }
  if (t == "expr") {
    only_keys(o, {"type", "formula"}, path);
    const Json& f = member(o, "formula", path);
    const std::string fp = path + ".formula";
    if (!f.is_string()) bad(fp, "expected a formula string");
    try {
      return Objective(dims, ExprObjective{parse_formula(f.get<std::string>(), dims)});
    } catch (const UnknownVariableError& e) {
      throw UnknownVariableError(e.what(), 0, e.column(), fp);
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.what(), 0, e.column(), fp);
    }
  }
  bad(path + ".type", "unknown objective type \"" + t + "\"");
}

}  // namespace

GameProblem parse_problem(std::string_view text) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) bad("$", "expected a JSON object");
  only_keys(doc, {"levels", "dims", "objectives", "constraints"}, "$");
  const int n = integer(member(doc, "levels", "$"), "$.levels");
  if (n < 2) shape("$.levels", "a game needs at least two levels");
  const Json& jd = member(doc, "dims", "$");
  if (!jd.is_array()) bad("$.dims", "expected an array of level sizes");
  if (static_cast<int>(jd.size()) != n) {
    shape("$.dims", "expected " + std::to_string(n) + " level sizes, got " +
                        std::to_string(jd.size()));
  }
  std::vector<int> sizes;
  for (size_t i = 0; i < jd.size(); ++i) {
    const std::string p = "$.dims[" + std::to_string(i) + "]";
    const int m = integer(jd[i], p);
    if (m < 1) shape(p, "level sizes must be at least 1");
    sizes.push_back(m);
  }
  const Dims dims(sizes);

  const Json& jo = member(doc, "objectives", "$");
  if (!jo.is_array()) bad("$.objectives", "expected an array of objectives");
  if (static_cast<int>(jo.size()) != n) {
    shape("$.objectives", "expected " + std::to_string(n) + " objectives, got " +
                              std::to_string(jo.size()));
  }
  GameProblem problem{dims, {}, std::nullopt, 0};
  for (int i = 0; i < n; ++i) {
    problem.objectives.push_back(
        parse_objective(jo[i], dims, "$.objectives[" + std::to_string(i) + "]"));
  }

  if (const auto it = doc.find("constraints"); it != doc.end()) {
    const std::string cp = "$.constraints";
    if (!it->is_object()) bad(cp, "expected an object with \"A\" and \"b\"");
    only_keys(*it, {"A", "b"}, cp);
    LinearConstraints lc;
    lc.b = vector_of(member(*it, "b", cp), cp + ".b");
    const Json& ja = member(*it, "A", cp);
    if (!ja.is_array() || static_cast<int>(ja.size()) != n) {
      shape(cp + ".A", "expected one matrix per level (" + std::to_string(n) + ")");
    }
    for (int j = 0; j < n; ++j) {
      const std::string ap = cp + ".A[" + std::to_string(j) + "]";
      Matrix a = matrix_of(ja[j], ap, dims.size(j));
      expect_shape(a, lc.rows(), dims.size(j), ap);
      lc.a_blocks.push_back(std::move(a));
    }
    problem.constraints = std::move(lc);
  }

  for (const Diagnostic& d : validate(problem)) {
    if (d.severity == Severity::kError) {
      throw ShapeMismatchError(d.message, 0, 0,
                               d.objective >= 0
                                   ? "$.objectives[" + std::to_string(d.objective) + "]"
                                   : "$");
    }
  }
  return problem;
}

std::string write_problem(const GameProblem& problem) {
  using detail::matrix_json;
  using detail::vector_json;
  const Dims& dims = problem.dims;
  Json doc;
  doc["levels"] = dims.levels();
  doc["dims"] = dims.sizes();
  Json objs = Json::array();
  for (const Objective& obj : problem.objectives) {
    Json o;
    if (const auto* q = obj.quadratic()) {
      o["type"] = "quadratic";
      Json a = Json::object();
      for (const auto& [jk, m] : q->blocks) {
        a[std::to_string(jk.first + 1) + "," + std::to_string(jk.second + 1)] = matrix_json(m);
      }
      o["A"] = std::move(a);
      Json l = Json::array();
      for (int j = 0; j < dims.levels(); ++j) {
        l.push_back(vector_json(q->linear.empty() ? Vector::Zero(dims.size(j))
                                                  : q->linear[j]));
      }
      o["l"] = std::move(l);
      o["constant"] = detail::number_json(q->constant);
    } else {
      o["type"] = "expr";
      o["formula"] = print_formula(obj.expr()->root);
    }
    objs.push_back(std::move(o));
  }
  doc["objectives"] = std::move(objs);
  if (problem.constraints) {
    Json c;
    Json a = Json::array();
    for (const Matrix& m : problem.constraints->a_blocks) a.push_back(matrix_json(m));
    c["A"] = std::move(a);
    c["b"] = vector_json(problem.constraints->b);
    doc["constraints"] = std::move(c);
  }
  return doc.dump(2) + "\n";
}

std::vector<StrategyEntry> parse_strategies(std::string_view text, const Dims& dims) {
  const Json doc = parse_json(text);
  if (!doc.is_object()) bad("$", "expected a JSON object");
  only_keys(doc, {"strategies"}, "$");
  const Json& js = member(doc, "strategies", "$");
  if (!js.is_array()) bad("$.strategies", "expected an array of strategies");
  const int n = dims.levels();
  std::vector<StrategyEntry> out;
  std::set<int> seen;
  for (size_t i = 0; i < js.size(); ++i) {
    const std::string p = "$.strategies[" + std::to_string(i) + "]";
    const Json& s = js[i];
    if (!s.is_object()) bad(p, "expected a strategy object");
    only_keys(s, {"level", "offset", "coeffs"}, p);
    StrategyEntry e;
    const int level = integer(member(s, "level", p), p + ".level");
    if (level < 1 || level > n - 1) {
      shape(p + ".level", "strategy level must be between 1 and " + std::to_string(n - 1));
    }
    if (!seen.insert(level).second) bad(p + ".level", "level defined twice");
    e.level = level - 1;
    e.offset = vector_of(member(s, "offset", p), p + ".offset");
    const int m = dims.size(level - 1);
    if (e.offset.size() != m) {
      shape(p + ".offset", "expected " + std::to_string(m) + " entries, got " +
                               std::to_string(e.offset.size()));
    }
    for (int j = level; j < n; ++j) e.coeffs.push_back(Matrix::Zero(m, dims.size(j)));
    if (const auto it = s.find("coeffs"); it != s.end()) {
      if (!it->is_object()) bad(p + ".coeffs", "expected an object keyed by level");
      for (const auto& [key, mat] : it->items()) {
        const std::string kp = p + ".coeffs[\"" + key + "\"]";
        int j = 0;
        if (!parse_int(key, j)) bad(kp, "coefficient key must be a level number");
        if (j <= level || j > n) {
          shape(kp, "coefficients may only refer to levels " + std::to_string(level + 1) +
                        ".." + std::to_string(n));
        }
        Matrix q = matrix_of(mat, kp, dims.size(j - 1));
        expect_shape(q, m, dims.size(j - 1), kp);
        e.coeffs[j - level - 1] = std::move(q);
      }
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const StrategyEntry& a, const StrategyEntry& b) { return a.level < b.level; });
  return out;
}

std::string write_strategies(const std::vector<AffineStrategy>& strategies) {
  Json arr = Json::array();
  for (const AffineStrategy& s : strategies) {
    Json o;
    o["level"] = s.level + 1;
    o["offset"] = detail::vector_json(s.offset());
    Json c = Json::object();
    for (int k = 0; k < s.lower_levels(); ++k) {
      c[std::to_string(s.level + k + 2)] = detail::matrix_json(s.coeffs[k]);
    }
    o["coeffs"] = std::move(c);
    arr.push_back(std::move(o));
  }
  Json doc;
  doc["strategies"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::vector<Matrix> parse_matrix_list(std::string_view text) {
  std::vector<Matrix> out;
  size_t start = 0;
  int item = 0;
  while (true) {
    const size_t semi = text.find(';', start);
    const std::string_view part =
        text.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
    const std::string p = "params[" + std::to_string(item) + "]";
    Json j;
    try {
      j = Json::parse(part.begin(), part.end());
    } catch (const Json::parse_error&) {
      bad(p, "expected a JSON matrix such as [[0.1, 0.2]]");
    }
    out.push_back(matrix_of(j, p));
    ++item;
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

}  // namespace revstack
