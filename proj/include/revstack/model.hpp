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

// Multilevel game model: per-level objectives over a joint decision space and
// optional joint linear constraints.

#ifndef REVSTACK_MODEL_HPP_
#define REVSTACK_MODEL_HPP_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "revstack/expr.hpp"
#include "revstack/types.hpp"

namespace revstack {

// J(u) = sum_{j<=k} <u^j, A_jk u^k> + sum_k <u^k, l_k> + constant.
//
// Only the upper triangle j <= k is stored, so every cross term appears once.
// Diagonal blocks are expected to be symmetric; validate() reports when not.
struct QuadraticObjective {
  // Keyed by 0-based (j, k) with j <= k. Missing blocks are zero.
  std::map<std::pair<int, int>, Matrix> blocks;
  // Either empty (all zero) or one vector per level.
  std::vector<Vector> linear;
  double constant = 0.0;

  // Throws DimensionError naming the first inconsistent level.
  void check_shapes(const Dims& dims) const;

  // Assembled form J(x) = 1/2 x'Hx + g'x + c over the flat variable vector.
  // H is symmetric with H_jj = A_jj + A_jj', H_jk = A_jk, H_kj = A_jk'.
  Matrix hessian(const Dims& dims) const;
  Vector linear_term(const Dims& dims) const;

  // Inverse of the assembled form. The diagonal blocks come out symmetric.
  static QuadraticObjective from_assembled(const Dims& dims, const Matrix& hessian,
                                           const Vector& linear, double constant);
};

struct ExprObjective {
  Expr root;
};

class Objective {
 public:
  Objective(Dims dims, QuadraticObjective q) : dims_(std::move(dims)), form_(std::move(q)) {}
  Objective(Dims dims, ExprObjective e) : dims_(std::move(dims)), form_(std::move(e)) {}

  const Dims& dims() const { return dims_; }
  bool is_quadratic() const { return std::holds_alternative<QuadraticObjective>(form_); }
  const QuadraticObjective* quadratic() const { return std::get_if<QuadraticObjective>(&form_); }
  const ExprObjective* expr() const { return std::get_if<ExprObjective>(&form_); }

  // Throws DimensionError if the stored form is inconsistent with dims().
  void check() const;

 private:
  Dims dims_;
  std::variant<QuadraticObjective, ExprObjective> form_;
};

// sum_l A^l u^l <= b, componentwise. One k x m_l block per level.
struct LinearConstraints {
  std::vector<Matrix> a_blocks;
  Vector b;

  int rows() const { return static_cast<int>(b.size()); }
  void check_shapes(const Dims& dims) const;
  // [A^1 ... A^n] as a single k x total matrix.
  Matrix joint(const Dims& dims) const;
};

struct GameProblem {
  Dims dims;
  // objectives[0] belongs to the top leader, objectives.back() to the bottom follower.
  std::vector<Objective> objectives;
  std::optional<LinearConstraints> constraints;
  // Absolute level of objectives[0]. Non-zero only for problems produced by
  // reduce_problem, so strategies keep the level numbering of the original game.
  int first_level = 0;

  int levels() const { return dims.levels(); }
  // Throws DimensionError on any structural inconsistency.
  void check() const;
};

// Value of the objective at a point. Pure and deterministic.
// Throws DimensionError when the point or the objective disagrees with its dims.
double evaluate(const Objective& obj, const DecisionPoint& p);

enum class Severity { kInfo, kWarning, kError };

struct Diagnostic {
  Severity severity;
  int objective;  // 0-based objective index, -1 for the problem as a whole
  std::string message;
};

struct ValidateOptions {
  // Report cross blocks A_ki (k != i) that are nonzero in objective i. Some
  // quadratic game families assume those vanish; this is informational only.
  bool note_cross_blocks = false;
};

// Shape consistency, symmetry and positive-definiteness of diagonal quadratic
// blocks, and variable ranges of expressions. Never throws.
std::vector<Diagnostic> validate(const GameProblem& problem, const ValidateOptions& options = {});
bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Bilinear expansion of a quadratic objective with one term per nonzero
// coefficient. The zero objective maps to Constant(0).
ExprObjective quadratic_to_expr(const QuadraticObjective& q, const Dims& dims);

// Allocation-free evaluator over flat points, for inner loops. Not thread
// safe; copy one per thread.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(const Objective& obj);
  double operator()(const double* x);
  double operator()(const Vector& x) { return (*this)(x.data()); }

 private:
  int n_ = 0;
  bool quadratic_ = false;
  Matrix hessian_;
  Vector linear_;
  double constant_ = 0.0;
  std::optional<CompiledExpr> compiled_;
  std::vector<double> stack_;
};

}  // namespace revstack

#endif  // REVSTACK_MODEL_HPP_
