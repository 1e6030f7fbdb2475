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

#include "revstack/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "report.hpp"
#include "revstack/constrained.hpp"
#include "revstack/document.hpp"
#include "revstack/equilibrium.hpp"
#include "revstack/error.hpp"
#include "revstack/synthesis.hpp"
#include "revstack/verify.hpp"

namespace revstack {

namespace {

using detail::Json;

struct Options {
  double tol = 1e-4;
  double grid_radius = 10.0;
  int grid_points = 41;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output = "text";
  int samples = 0;
  std::string params;
  bool family = false;
  double box = 0.0;
  std::string problem_file;
  std::string strategy_file;

  bool json() const { return output == "json"; }
  GridSpec grid() const {
    GridSpec g;
    g.radius = grid_radius;
    g.points = grid_points;
    g.threads = threads;
    return g;
  }
  SamplingOptions sampling() const {
    SamplingOptions s;
    s.seed = seed;
    s.sublevel.seed = seed;
    return s;
  }
};

// Terminates a command with an exit code after the message was written.
struct Exit {
  int code;
};

std::string read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read " << path << "\n";
    throw Exit{kExitPrecondition};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void report_parse_error(const ParseError& e, const std::string& file, std::ostream& err) {
  const char* kind = dynamic_cast<const UnknownVariableError*>(&e) ? "unknown variable"
                     : dynamic_cast<const ShapeMismatchError*>(&e) ? "dimension mismatch"
                                                                   : "syntax error";
  err << file << ":";
  if (e.line() > 0) err << e.line() << ":" << e.column() << ":";
  err << " " << kind;
  if (!e.path().empty()) {
    err << " at " << e.path();
    if (e.column() > 0) err << " (formula column " << e.column() << ")";
  }
  err << ": " << e.what() << "\n";
}

GameProblem load_problem(const Options& o, std::ostream& err) {
  const std::string text = read_file(o.problem_file, err);
  try {
    GameProblem p = parse_problem(text);
    for (const Diagnostic& d : validate(p)) {
      if (d.severity == Severity::kWarning) {
        err << "warning";
        if (d.objective >= 0) err << " (objective " << d.objective + 1 << ")";
        err << ": " << d.message << "\n";
      }
    }
    return p;
  } catch (const ParseError& e) {
    report_parse_error(e, o.problem_file, err);
    throw Exit{kExitParse};
  }
}

EquilibriumResult solve_equilibrium(const GameProblem& p, std::ostream& err) {
  try {
    return desired_equilibrium(p);
  } catch (const EquilibriumError& e) {
    err << "error: no desired equilibrium: " << e.what() << "\n";
  } catch (const NonConvergenceError& e) {
    err << "error: no desired equilibrium: " << e.what() << "\n";
  }
  throw Exit{kExitPrecondition};
}

std::vector<AffineStrategy> load_strategies(const Options& o, const GameProblem& p,
                                            const DecisionPoint& d, bool require_all,
                                            std::ostream& err) {
  const std::string text = read_file(o.strategy_file, err);
  std::vector<StrategyEntry> entries;
  try {
    entries = parse_strategies(text, p.dims);
  } catch (const ParseError& e) {
    report_parse_error(e, o.strategy_file, err);
    throw Exit{kExitParse};
  }
  if (require_all && static_cast<int>(entries.size()) != p.levels() - 1) {
    err << o.strategy_file << ": dimension mismatch: strategies for levels 1.."
        << p.levels() - 1 << " are required\n";
    throw Exit{kExitParse};
  }
  if (entries.empty()) {
    err << o.strategy_file << ": no strategies\n";
    throw Exit{kExitParse};
  }
  std::vector<AffineStrategy> out;
  for (StrategyEntry& e : entries) {
    out.push_back(AffineStrategy::from_offset(e.level, d, e.offset, std::move(e.coeffs)));
  }
  return out;
}

void emit(const Options& o, std::ostream& out, const Json& j, const std::string& text) {
  if (o.json()) {
    out << j.dump(2) << "\n";
  } else {
    out << text;
  }
}

std::vector<Matrix> random_params(const StrategyFamily& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Matrix> t = f.zero_parameters();
  for (Matrix& m : t) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  }
  return t;
}

// --------------------------------------------------------------------------

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const GameProblem p = load_problem(o, err);
  const EquilibriumResult eq = solve_equilibrium(p, err);
  Json j;
  j["command"] = "solve";
  j["status"] = nullptr;
  j["equilibrium"] = detail::equilibrium_json(eq);
  j["strategies"] = nullptr;
  j["verification"] = nullptr;
  j["error"] = "";
  std::string text = detail::equilibrium_text(eq);

  std::vector<AffineStrategy> strategies;
  try {
    strategies = synthesize_cascade(p, eq.point);
  } catch (const SynthesisError& e) {
    err << "error: " << e.what() << "\n";
    j["status"] = "existence-failure";
    j["error"] = e.what();
    emit(o, out, j, text + "existence failure at level " + std::to_string(e.level() + 1) + ": " +
                        e.condition() + " does not hold\n");
    return kExitPrecondition;
  }
  const VerificationReport rep = verify_full(p, strategies, o.tol, o.grid(), o.sampling());
  j["status"] = rep.verified ? "verified" : "failed";
  j["strategies"] = detail::strategies_json(strategies, p.dims);
  j["verification"] = detail::verification_json(rep);
  emit(o, out, j,
       text + detail::strategies_text(strategies, p.dims) + detail::verification_text(rep));
  if (!rep.verified) {
    for (const std::string& why : rep.reasons) err << "verification failed: " << why << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_family(const Options& o, std::ostream& out, std::ostream& err) {
  const GameProblem p = load_problem(o, err);
  const EquilibriumResult eq = solve_equilibrium(p, err);
  StrategyFamily fam;
  try {
    fam = synthesize_family_leader(p, eq.point);
  } catch (const SynthesisError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  Json j;
  j["command"] = "family";
  j["status"] = "described";
  j["equilibrium"] = detail::equilibrium_json(eq);
  j["family"] = detail::family_json(fam);
  j["notice"] = fam.parameter_rows() == 0 ? "family is a single point" : "";
  std::string text = detail::equilibrium_text(eq) + detail::family_text(fam);

  std::vector<std::vector<Matrix>> members;
  if (!o.params.empty()) {
    std::vector<Matrix> t;
    try {
      t = parse_matrix_list(o.params);
    } catch (const ParseError& e) {
      err << "--params: syntax error at " << e.path() << ": " << e.what() << "\n";
      return kExitParse;
    }
    if (t.size() != fam.particular.size()) {
      err << "--params: dimension mismatch: expected " << fam.particular.size()
          << " matrices separated by ';'\n";
      return kExitParse;
    }
    for (size_t k = 0; k < t.size(); ++k) {
      if (t[k].rows() == 0) t[k].resize(0, fam.particular[k].cols());
      if (t[k].rows() != fam.parameter_rows() || t[k].cols() != fam.particular[k].cols()) {
        err << "--params: dimension mismatch: T" << k + 1 << " must be " << fam.parameter_rows()
            << "x" << fam.particular[k].cols() << "\n";
        return kExitParse;
      }
    }
    members.push_back(std::move(t));
  }
  std::mt19937_64 rng(o.seed);
  for (int i = 0; i < o.samples; ++i) members.push_back(random_params(fam, rng));

  bool all_ok = true;
  Json mj = Json::array();
  for (size_t i = 0; i < members.size(); ++i) {
    Json m;
    m["params"] = detail::params_json(members[i]);
    m["strategies"] = nullptr;
    m["verification"] = nullptr;
    m["error"] = "";
    text += "member " + std::to_string(i + 1) + ":\n";
    try {
      const AffineStrategy top = instantiate(fam, members[i]);
      const std::vector<AffineStrategy> s = synthesize_cascade(p, eq.point, top);
      const VerificationReport rep = verify_full(p, s, o.tol, o.grid(), o.sampling());
      m["strategies"] = detail::strategies_json(s, p.dims);
      m["verification"] = detail::verification_json(rep);
      text += detail::strategies_text(s, p.dims) + detail::verification_text(rep);
      all_ok = all_ok && rep.verified;
    } catch (const SynthesisError& e) {
      m["error"] = e.what();
      text += std::string("  cannot complete the cascade: ") + e.what() + "\n";
      all_ok = false;
    }
    mj.push_back(std::move(m));
  }
  j["members"] = std::move(mj);
  if (!members.empty()) j["status"] = all_ok ? "verified" : "failed";
  emit(o, out, j, text);
  if (!all_ok) {
    err << "verification failed for at least one family member\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const GameProblem p = load_problem(o, err);
  const EquilibriumResult eq = solve_equilibrium(p, err);
  std::vector<AffineStrategy> s;
  try {
    s = load_strategies(o, p, eq.point, true, err);
  } catch (const DimensionError& e) {
    err << o.strategy_file << ": dimension mismatch: " << e.what() << "\n";
    return kExitParse;
  }
  const VerificationReport rep = verify_full(p, s, o.tol, o.grid(), o.sampling());
  Json j;
  j["command"] = "verify";
  j["status"] = rep.verified ? "verified" : "failed";
  j["equilibrium"] = detail::equilibrium_json(eq);
  j["strategies"] = detail::strategies_json(s, p.dims);
  j["verification"] = detail::verification_json(rep);
  emit(o, out, j,
       detail::equilibrium_text(eq) + detail::strategies_text(s, p.dims) +
           detail::verification_text(rep));
  if (!rep.verified) {
    for (const std::string& why : rep.reasons) err << "verification failed: " << why << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_feasible(const Options& o, std::ostream& out, std::ostream& err) {
  const GameProblem p = load_problem(o, err);
  if (!p.constraints || p.constraints->rows() == 0) {
    err << "nothing to check: the problem has no constraints\n";
    return kExitPrecondition;
  }
  if (o.strategy_file.empty() == !o.family) {
    err << "feasible needs either a strategy file or --family\n";
    return kExitParse;
  }
  const EquilibriumResult eq = solve_equilibrium(p, err);
  std::optional<VariableBounds> bounds;
  if (o.box > 0.0) bounds = VariableBounds(p.dims.total(), {-o.box, o.box});

  Json warnings = Json::array();
  if (const auto act = active_rows(*p.constraints, p.dims, eq.point); !act.empty()) {
    std::string rows;
    for (int r : act) rows += (rows.empty() ? "" : ", ") + std::to_string(r + 1);
    const std::string w = "constraint rows " + rows +
                          " are active at the desired point; the existence conditions are only "
                          "necessary there";
    err << "warning: " << w << "\n";
    warnings.push_back(w);
  }

  Json checks = Json::array();
  std::string text;
  bool all_feasible = true;
  const auto record = [&](const std::string& label, const Json& params,
                          const FeasibilityVerdict& v) {
    Json c;
    c["label"] = label;
    c["params"] = params;
    c["verdict"] = detail::feasibility_json(v);
    checks.push_back(std::move(c));
    text += label + ": " + detail::feasibility_text(v);
    if (!v.feasible) {
      all_feasible = false;
      if (v.worst_row >= 0) {
        err << label << ": infeasible, constraint row " << v.worst_row + 1 << " violated by "
            << v.worst_margin << "\n";
      } else {
        err << label << ": infeasible, the lower-level region is empty\n";
      }
    }
  };
  try {
    if (o.family) {
      StrategyFamily fam;
      try {
        fam = synthesize_family_leader(p, eq.point);
      } catch (const SynthesisError& e) {
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
      }
      std::mt19937_64 rng(o.seed);
      std::vector<std::vector<Matrix>> grid;
      const int n = std::max(o.samples, 1);
      for (int i = 0; i < n; ++i) grid.push_back(random_params(fam, rng));
      const auto items = filter_family(fam, *p.constraints, p.dims, grid, 1e-9, bounds);
      for (size_t i = 0; i < items.size(); ++i) {
        if (!items[i].verdict) {
          err << "member " << i + 1 << ": " << items[i].error << "\n";
          return kExitPrecondition;
        }
        record("member " + std::to_string(i + 1), detail::params_json(items[i].params),
               *items[i].verdict);
      }
    } else {
      std::vector<AffineStrategy> s;
      try {
        s = load_strategies(o, p, eq.point, false, err);
      } catch (const DimensionError& e) {
        err << o.strategy_file << ": dimension mismatch: " << e.what() << "\n";
        return kExitParse;
      }
      for (const AffineStrategy& x : s) {
        record("strategy u" + std::to_string(x.level + 1), nullptr,
               feasibility_check(x, *p.constraints, p.dims, 1e-9, bounds));
      }
    }
  } catch (const UnboundedRegionError& e) {
    err << "error: " << e.what() << " (use --box R)\n";
    return kExitPrecondition;
  }
  Json j;
  j["command"] = "feasible";
  j["status"] = all_feasible ? "feasible" : "infeasible";
  j["warnings"] = std::move(warnings);
  j["checks"] = std::move(checks);
  emit(o, out, j, text);
  return all_feasible ? kExitOk : kExitFailed;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "argmin tolerance for verification")
      ->check(CLI::PositiveNumber);
  sub->add_option("--grid-radius", o.grid_radius, "half-width of the oracle grid")
      ->check(CLI::PositiveNumber);
  sub->add_option("--grid-points", o.grid_points, "oracle grid points per axis")
      ->check(CLI::Range(2, 100000));
  sub->add_option("--seed", o.seed, "seed for all sampling");
  sub->add_option("--threads", o.threads, "threads for the oracle grid")
      ->check(CLI::Range(1, 256));
  sub->add_option("--output", o.output, "report format")->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Synthesize and verify affine reverse Stackelberg strategies", "revstack"};
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "desired equilibrium, strategy cascade, verification");
  solve->add_option("problem", o.problem_file, "problem document")->required();
  add_common(solve, o);

  CLI::App* family = app.add_subcommand("family", "parametric family of leader strategies");
  family->add_option("problem", o.problem_file, "problem document")->required();
  family->add_option("--samples", o.samples, "verify this many seeded members")
      ->check(CLI::NonNegativeNumber);
  family->add_option("--params", o.params, "member parameters \"T1;T2;...\" as JSON matrices");
  add_common(family, o);

  CLI::App* verify = app.add_subcommand("verify", "verify strategies from a file");
  verify->add_option("problem", o.problem_file, "problem document")->required();
  verify->add_option("strategies", o.strategy_file, "strategy document")->required();
  add_common(verify, o);

  CLI::App* feasible = app.add_subcommand("feasible", "check strategies against the constraints");
  feasible->add_option("problem", o.problem_file, "problem document")->required();
  feasible->add_option("strategies", o.strategy_file, "strategy document");
  feasible->add_flag("--family", o.family, "check seeded members of the leader family");
  feasible->add_option("--samples", o.samples, "number of family members")
      ->check(CLI::NonNegativeNumber);
  feasible->add_option("--box", o.box, "bound every variable by |x| <= R")
      ->check(CLI::PositiveNumber);
  add_common(feasible, o);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParse;
  }

  try {
    if (solve->parsed()) return cmd_solve(o, out, err);
    if (family->parsed()) return cmd_family(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
    return cmd_feasible(o, out, err);
  } catch (const Exit& e) {
    return e.code;
  } catch (const ParseError& e) {
    report_parse_error(e, o.problem_file, err);
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
}

}  // namespace revstack
