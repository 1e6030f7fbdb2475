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

#include "revstack/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "revstack/calculus.hpp"
#include "revstack/error.hpp"

namespace revstack {

const char* to_string(EquilibriumMethod method) {
  switch (method) {
    case EquilibriumMethod::kLinearSolve:
      return "linear-solve";
    case EquilibriumMethod::kDescent:
      return "descent";
    case EquilibriumMethod::kActiveSet:
      return "active-set";
  }
  return "unknown";
}

namespace {

struct AssembledQuadratic {
  Matrix h;
  Vector g;
  double c;
};

AssembledQuadratic top_quadratic(const GameProblem& problem) {
  problem.check();
  const auto q = as_quadratic(problem.objectives.front());
  if (!q) {
    throw EquilibriumError(EquilibriumError::Kind::kBadInput,
                           "top objective is not quadratic; use descent");
  }
  return {q->hessian(problem.dims), q->linear_term(problem.dims), q->constant};
}

double quad_value(const AssembledQuadratic& q, const Vector& x) {
  return 0.5 * x.dot(q.h * x) + q.g.dot(x) + q.c;
}

bool positive_definite(const Matrix& h) {
  Eigen::LLT<Matrix> llt(h);
  return llt.info() == Eigen::Success;
}

}  // namespace

EquilibriumResult team_optimum_quadratic(const GameProblem& problem) {
  const AssembledQuadratic q = top_quadratic(problem);
  if (problem.constraints && problem.constraints->rows() > 0) {
    throw EquilibriumError(EquilibriumError::Kind::kBadInput,
                           "problem is constrained; use the active-set solver");
  }
  Eigen::FullPivLU<Matrix> lu(q.h);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw EquilibriumError(EquilibriumError::Kind::kNoUniqueOptimum,
                           "no unique team optimum: stationarity system is singular");
  }
  if (!positive_definite(q.h)) {
    throw EquilibriumError(EquilibriumError::Kind::kNotAMinimum,
                           "stationary point is not a minimum: Hessian is indefinite");
  }
  const Vector x = lu.solve(-q.g);
  EquilibriumResult r;
  r.point = DecisionPoint::from_flat(problem.dims, x);
  r.objective_value = quad_value(q, x);
  r.method = EquilibriumMethod::kLinearSolve;
  r.kkt_residual = (q.h * x + q.g).norm();
  return r;
}

EquilibriumResult team_optimum_descent(const GameProblem& problem,
                                       std::span<const DecisionPoint> starts, double tol,
                                       int max_iters) {
  problem.check();
  if (!(tol > 0.0)) throw std::invalid_argument("descent tolerance must be positive");
  if (starts.empty()) throw std::invalid_argument("descent needs at least one start");
  const Objective& top = problem.objectives.front();
  ObjectiveEvaluator f(top);

  std::optional<EquilibriumResult> best;
  Vector best_iterate;
  double best_iterate_value = std::numeric_limits<double>::infinity();
  double best_iterate_grad = std::numeric_limits<double>::infinity();

  for (const DecisionPoint& start : starts) {
    start.check(problem.dims);
    Vector x = start.flatten();
    double fx = f(x);
    Vector g = gradient_flat(top, x);
    double step = 1.0;
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
      const double gn2 = g.squaredNorm();
      if (std::sqrt(gn2) <= tol) {
        converged = true;
        break;
      }
      step = std::min(step * 2.0, 1e8);
      Vector trial = x - step * g;
      double ft = f(trial);
      while (!(ft < fx - 1e-4 * step * gn2) && step > 1e-300) {
        step *= 0.5;
        trial = x - step * g;
        ft = f(trial);
      }
      Vector gt;
      if (!(ft < fx - 1e-4 * step * gn2)) {
        // Near the minimizer the decrease drops below rounding of f; accept a
        // step that shrinks the gradient without raising f beyond rounding.
        const double slack = 1e-12 * (1.0 + std::abs(fx));
        double best_g2 = gn2;
        for (double s = 1e4; s > 1e-12; s *= 0.5) {
          const Vector xs = x - s * g;
          const double fs = f(xs);
          if (fs > fx + slack) continue;
          Vector gs = gradient_flat(top, xs);
          if (gs.squaredNorm() < best_g2) {
            best_g2 = gs.squaredNorm();
            trial = xs;
            ft = fs;
            gt = std::move(gs);
            step = s;
          }
        }
        if (!(best_g2 < gn2)) break;  // no progress possible at working precision
      } else {
        gt = gradient_flat(top, trial);
      }
      x = std::move(trial);
      fx = ft;
      g = std::move(gt);
    }
    const double gn = g.norm();
    if (!converged && gn <= tol) converged = true;
    if (fx < best_iterate_value) {
      best_iterate_value = fx;
      best_iterate = x;
      best_iterate_grad = gn;
    }
    if (converged && (!best || fx < best->objective_value)) {
      EquilibriumResult r;
      r.point = DecisionPoint::from_flat(problem.dims, x);
      r.objective_value = fx;
      r.method = EquilibriumMethod::kDescent;
      r.kkt_residual = gn;
      best = std::move(r);
    }
  }
  if (!best) {
    throw NonConvergenceError("descent did not reach gradient norm " + std::to_string(tol) +
                                  " within " + std::to_string(max_iters) + " iterations",
                              best_iterate, best_iterate_grad);
  }
  return *best;
}

EquilibriumResult team_optimum_constrained(const GameProblem& problem,
                                           const ActiveSetOptions& options) {
  const AssembledQuadratic q = top_quadratic(problem);
  if (!problem.constraints) {
    throw EquilibriumError(EquilibriumError::Kind::kBadInput, "problem has no constraints");
  }
  if (!positive_definite(q.h)) {
    throw EquilibriumError(EquilibriumError::Kind::kNotAMinimum,
                           "top objective Hessian is not positive definite");
  }
  const Matrix a = problem.constraints->joint(problem.dims);
  const Vector& b = problem.constraints->b;
  const int k = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (k > options.max_constraints) {
    throw EquilibriumError(EquilibriumError::Kind::kTooManyConstraints,
                           std::to_string(k) + " constraints exceed the active-set bound of " +
                               std::to_string(options.max_constraints) + "; use descent instead");
  }

  struct Candidate {
    double value;
    std::vector<int> active;
    Vector x;
    double residual;
  };
  std::optional<Candidate> best;

  // Visit every subset of at most n rows; more rows than variables cannot be
  // linearly independent.
  std::vector<int> active;
  const auto consider = [&](const std::vector<int>& s) {
    const int m = static_cast<int>(s.size());
    Matrix kkt = Matrix::Zero(n + m, n + m);
    Vector rhs(n + m);
    kkt.topLeftCorner(n, n) = q.h;
    rhs.head(n) = -q.g;
    for (int i = 0; i < m; ++i) {
      kkt.block(0, n + i, n, 1) = a.row(s[i]).transpose();
      kkt.block(n + i, 0, 1, n) = a.row(s[i]);
      rhs[n + i] = b[s[i]];
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) return;
    const Vector sol = lu.solve(rhs);
    const Vector x = sol.head(n);
    const Vector lambda = sol.tail(m);
    const double scale = 1.0 + q.g.cwiseAbs().maxCoeff() + q.h.cwiseAbs().maxCoeff();
    if (m > 0 && lambda.minCoeff() < -1e-10 * scale) return;
    const Vector slack = a * x - b;
    for (int r = 0; r < k; ++r) {
      if (slack[r] > options.feasibility_tol * (1.0 + std::abs(b[r]))) return;
    }
    const double value = quad_value(q, x);
    Vector stat = q.h * x + q.g;
    for (int i = 0; i < m; ++i) stat += lambda[i] * a.row(s[i]).transpose();
    Candidate c{value, s, x, stat.norm()};
    if (!best) {
      best = std::move(c);
      return;
    }
    const double tie = 1e-12 * (1.0 + std::abs(best->value));
    if (c.value < best->value - tie ||
        (std::abs(c.value - best->value) <= tie && c.active < best->active)) {
      best = std::move(c);
    }
  };
  const auto recurse = [&](auto&& self, int next) -> void {
    consider(active);
    if (static_cast<int>(active.size()) == n) return;
    for (int r = next; r < k; ++r) {
      active.push_back(r);
      self(self, r + 1);
      active.pop_back();
    }
  };
  recurse(recurse, 0);

  if (!best) {
    throw EquilibriumError(EquilibriumError::Kind::kInfeasible, "constraint set is infeasible");
  }
  EquilibriumResult r;
  r.point = DecisionPoint::from_flat(problem.dims, best->x);
  r.objective_value = best->value;
  r.method = EquilibriumMethod::kActiveSet;
  r.kkt_residual = best->residual;
  r.active_set = best->active;
  return r;
}

EquilibriumResult desired_equilibrium(const GameProblem& problem) {
  problem.check();
  const bool constrained = problem.constraints && problem.constraints->rows() > 0;
  if (as_quadratic(problem.objectives.front())) {
    return constrained ? team_optimum_constrained(problem) : team_optimum_quadratic(problem);
  }
  if (constrained) {
    throw EquilibriumError(EquilibriumError::Kind::kBadInput,
                           "constrained problems need a quadratic top objective");
  }
  const DecisionPoint start = DecisionPoint::zeros(problem.dims);
  return team_optimum_descent(problem, std::span(&start, 1), 1e-10, 200000);
}

}  // namespace revstack
