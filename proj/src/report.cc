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

#include "report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "revstack/formula.hpp"

namespace revstack::detail {

namespace {

std::string var_name(const Dims& dims, int level, int index) {
  std::string s = "u" + std::to_string(level + 1);
  if (dims.size(level) > 1) s += "_" + std::to_string(index + 1);
  return s;
}

std::string vec_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_number(v[i]);
  }
  return s + ")";
}

std::string mat_text(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) s += "; ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) s += ", ";
      s += format_number(m(r, c));
    }
  }
  return s + "]";
}

Json existence_json(const LevelReport& l) {
  Json e;
  e["passed"] = l.existence ? Json(l.existence->passed) : Json();
  e["condition"] = l.existence ? l.existence->condition : "";
  e["block_norm"] = l.existence ? number_json(l.existence->block_norm) : Json();
  e["tol"] = l.existence ? number_json(l.existence->tol) : Json();
  e["reason"] = l.existence ? l.existence->reason : "";
  Json conv;
  if (l.existence && l.existence->convexity) {
    conv = *l.existence->convexity == ConvexityVerdict::kCertified ? "certified" : "not-certified";
  }
  e["convexity"] = conv;
  e["error"] = l.existence_error;
  return e;
}

}  // namespace

std::vector<std::string> strategy_lines(const AffineStrategy& s, const Dims& dims) {
  const Vector c = s.offset();
  std::vector<std::string> out;
  for (Eigen::Index r = 0; r < c.size(); ++r) {
    std::string line = var_name(dims, s.level, static_cast<int>(r)) + " = " + format_number(c[r]);
    for (int k = 0; k < s.lower_levels(); ++k) {
      const int lvl = s.level + 1 + k;
      for (Eigen::Index col = 0; col < s.coeffs[k].cols(); ++col) {
        const double q = s.coeffs[k](r, col);
        if (q == 0.0) continue;
        line += q > 0 ? " - " : " + ";
        line += format_number(std::abs(q)) + "*" + var_name(dims, lvl, static_cast<int>(col));
      }
    }
    out.push_back(std::move(line));
  }
  return out;
}

Json point_json(const DecisionPoint& p) {
  Json a = Json::array();
  for (const Vector& b : p.blocks) a.push_back(vector_json(b));
  return a;
}

Json equilibrium_json(const EquilibriumResult& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["point"] = point_json(r.point);
  j["objective_value"] = number_json(r.objective_value);
  j["kkt_residual"] = number_json(r.kkt_residual);
  Json act = Json::array();
  for (int a : r.active_set) act.push_back(a + 1);
  j["active_set"] = std::move(act);
  return j;
}

Json strategy_json(const AffineStrategy& s, const Dims& dims) {
  Json j;
  j["level"] = s.level + 1;
  j["offset"] = vector_json(s.offset());
  Json c = Json::object();
  for (int k = 0; k < s.lower_levels(); ++k) {
    c[std::to_string(s.level + k + 2)] = matrix_json(s.coeffs[k]);
  }
  j["coeffs"] = std::move(c);
  j["realization_residual"] = number_json(s.realization_residual());
  j["text"] = strategy_lines(s, dims);
  return j;
}

Json strategies_json(const std::vector<AffineStrategy>& s, const Dims& dims) {
  Json a = Json::array();
  for (const AffineStrategy& x : s) a.push_back(strategy_json(x, dims));
  return a;
}

Json verification_json(const VerificationReport& r) {
  Json j;
  j["verified"] = r.verified;
  j["tol"] = number_json(r.tol);
  j["desired"] = point_json(r.desired);
  j["reasons"] = r.reasons;
  Json levels = Json::array();
  for (const LevelReport& l : r.levels) {
    Json lj;
    lj["level"] = l.level + 1;
    lj["existence"] = existence_json(l);
    lj["realization_residual"] = number_json(l.realization_residual);
    lj["realization_ok"] = l.realization_ok;
    Json h;
    h["max_residual"] = number_json(l.hyperplane.max_residual);
    h["scale"] = number_json(l.hyperplane.scale);
    h["samples"] = l.hyperplane.samples;
    h["passed"] = l.hyperplane.passed;
    lj["hyperplane"] = std::move(h);
    Json o;
    o["follower_level"] = l.level + 2;
    o["argmin"] = point_json(l.oracle.point);
    o["value"] = number_json(l.oracle.value);
    o["distance"] = number_json(l.argmin_distance);
    o["within_tol"] = l.argmin_ok;
    o["points_per_axis"] = l.oracle.points_per_axis;
    o["evaluations"] = l.oracle.evaluations;
    o["refinement_shift"] = number_json(l.oracle.refinement_shift);
    o["low_confidence"] = l.oracle.low_confidence;
    lj["oracle"] = std::move(o);
    lj["chain_residual"] = number_json(l.chain_residual);
    lj["chain_ok"] = l.chain_ok;
    Json s;
    s["samples"] = l.sublevel.samples;
    s["violations"] = l.sublevel.violations;
    s["threshold"] = number_json(l.sublevel.threshold);
    s["min_value"] = number_json(l.sublevel.min_value);
    s["min_point"] = vector_json(l.sublevel.min_point);
    lj["sublevel"] = std::move(s);
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  return j;
}

Json family_json(const StrategyFamily& f) {
  Json j;
  j["level"] = f.level + 1;
  j["normal"] = vector_json(f.normal);
  Json part = Json::object();
  Json shapes = Json::array();
  for (size_t k = 0; k < f.particular.size(); ++k) {
    part[std::to_string(f.level + static_cast<int>(k) + 2)] = matrix_json(f.particular[k]);
    shapes.push_back({f.parameter_rows(), f.particular[k].cols()});
  }
  j["particular"] = std::move(part);
  j["null_basis"] = matrix_json(f.null_basis);
  j["parameter_shapes"] = std::move(shapes);
  j["single_point"] = f.parameter_rows() == 0;
  return j;
}

Json params_json(const std::vector<Matrix>& params) {
  Json a = Json::array();
  for (const Matrix& m : params) a.push_back(matrix_json(m));
  return a;
}

Json feasibility_json(const FeasibilityVerdict& v) {
  Json j;
  j["feasible"] = v.feasible;
  j["worst_row"] = v.worst_row >= 0 ? Json(v.worst_row + 1) : Json();
  j["worst_margin"] = number_json(v.worst_margin);
  j["method"] = to_string(v.method);
  j["empty_region"] = v.empty_region;
  Json m = Json::array();
  for (double x : v.margins) m.push_back(number_json(x));
  j["margins"] = std::move(m);
  j["witness"] = vector_json(v.witness);
  return j;
}

std::string equilibrium_text(const EquilibriumResult& r) {
  std::ostringstream os;
  os << "desired equilibrium (" << to_string(r.method) << "):\n";
  for (size_t l = 0; l < r.point.blocks.size(); ++l) {
    os << "  u" << l + 1 << " = " << vec_text(r.point.blocks[l]) << "\n";
  }
  os << "  leader cost " << format_number(r.objective_value) << ", stationarity residual "
     << format_number(r.kkt_residual) << "\n";
  return os.str();
}

std::string strategies_text(const std::vector<AffineStrategy>& s, const Dims& dims) {
  std::ostringstream os;
  os << "strategies:\n";
  for (const AffineStrategy& x : s) {
    for (const std::string& line : strategy_lines(x, dims)) os << "  " << line << "\n";
    for (int k = 0; k < x.lower_levels(); ++k) {
      os << "    Q[" << x.level + 1 << "," << x.level + k + 2 << "] = " << mat_text(x.coeffs[k])
         << "\n";
    }
  }
  return os.str();
}

std::string verification_text(const VerificationReport& r) {
  std::ostringstream os;
  os << "verification: " << (r.verified ? "verified" : "FAILED") << " (tol "
     << format_number(r.tol) << ")\n";
  for (const LevelReport& l : r.levels) {
    os << "  level " << l.level + 1 << ":";
    if (l.existence) os << " existence " << (l.existence->passed ? "ok" : "fails") << ",";
    os << " realization " << format_number(l.realization_residual) << ", hyperplane "
       << format_number(l.hyperplane.max_residual) << "\n";
    os << "    follower u" << l.level + 2 << " best response " << vec_text(l.oracle.point.flatten())
       << ", distance " << format_number(l.argmin_distance)
       << (l.oracle.low_confidence ? " (low confidence)" : "") << "\n";
    os << "    chain residual " << format_number(l.chain_residual) << ", sublevel violations "
       << l.sublevel.violations << "/" << l.sublevel.samples << "\n";
  }
  for (const std::string& why : r.reasons) os << "  reason: " << why << "\n";
  return os.str();
}

std::string family_text(const StrategyFamily& f) {
  std::ostringstream os;
  os << "strategy family for u" << f.level + 1 << ":\n";
  os << "  follower gradient g = " << vec_text(f.normal) << "\n";
  for (size_t k = 0; k < f.particular.size(); ++k) {
    os << "  R[" << f.level + k + 2 << "] = " << mat_text(f.particular[k]) << "\n";
  }
  if (f.parameter_rows() == 0) {
    os << "  family is a single point\n";
  } else {
    os << "  null basis B = " << mat_text(f.null_basis) << "\n";
    for (size_t k = 0; k < f.particular.size(); ++k) {
      os << "  T" << k + 1 << " is " << f.parameter_rows() << "x" << f.particular[k].cols()
         << "\n";
    }
  }
  return os.str();
}

std::string feasibility_text(const FeasibilityVerdict& v) {
  std::ostringstream os;
  if (v.empty_region) {
    os << "infeasible: the lower-level region is empty";
  } else if (v.worst_row < 0) {
    os << "feasible: no constraints";
  } else {
    os << (v.feasible ? "feasible" : "infeasible") << ": worst row " << v.worst_row + 1
       << " margin " << format_number(v.worst_margin);
    if (!v.feasible) os << " at " << vec_text(v.witness);
  }
  return os.str() + "\n";
}

}  // namespace revstack::detail
