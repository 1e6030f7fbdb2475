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

// The leader's desired equilibrium: the joint minimizer of the top objective.

#ifndef REVSTACK_EQUILIBRIUM_HPP_
#define REVSTACK_EQUILIBRIUM_HPP_

#include <span>
#include <vector>

#include "revstack/model.hpp"

namespace revstack {

enum class EquilibriumMethod { kLinearSolve, kDescent, kActiveSet };

const char* to_string(EquilibriumMethod method);

struct EquilibriumResult {
  DecisionPoint point;
  double objective_value = 0.0;
  EquilibriumMethod method = EquilibriumMethod::kLinearSolve;
  // Stationarity residual; for the active-set method it includes the
  // multiplier term of the active rows.
  double kkt_residual = 0.0;
  // Active constraint rows (active-set method only), ascending.
  std::vector<int> active_set;
};

// Solves H x = -g for a quadratic (or degree-2 expression) top objective.
// Throws EquilibriumError: kNoUniqueOptimum for a singular system,
// kNotAMinimum for an indefinite Hessian, kBadInput if the top objective is
// not quadratic or the problem carries constraints.
EquilibriumResult team_optimum_quadratic(const GameProblem& problem);

// Multi-start gradient descent with Armijo backtracking. Returns the lowest
// local minimizer whose gradient norm reached tol. Throws NonConvergenceError
// (with the best iterate) if no start converges within max_iters.
EquilibriumResult team_optimum_descent(const GameProblem& problem,
                                       std::span<const DecisionPoint> starts, double tol,
                                       int max_iters);

struct ActiveSetOptions {
  int max_constraints = 20;
  double feasibility_tol = 1e-9;
};

// Exact minimizer of a strictly convex quadratic top objective under the
// problem's linear constraints, by enumerating active sets and solving each
// equality-constrained KKT system. Among equally good candidates the
// lexicographically smallest active set wins.
// Throws EquilibriumError: kInfeasible, kTooManyConstraints (suggests descent),
// kNotAMinimum if the Hessian is not positive definite, kBadInput otherwise.
EquilibriumResult team_optimum_constrained(const GameProblem& problem,
                                           const ActiveSetOptions& options = {});

// Picks the method from the problem: linear solve for an unconstrained
// quadratic top objective, active set for a constrained one, descent from the
// origin otherwise (constraints are then rejected with kBadInput).
EquilibriumResult desired_equilibrium(const GameProblem& problem);

}  // namespace revstack

#endif  // REVSTACK_EQUILIBRIUM_HPP_
