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

#include "revstack/model.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

#include "revstack/error.hpp"

namespace revstack {

namespace {

std::string level_name(int level) { return "level " + std::to_string(level + 1); }

}  // namespace

// ---------------------------------------------------------------------------
// Dims / DecisionPoint / BlockGradient

Dims::Dims(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DimensionError("game needs at least one level");
  offsets_.reserve(sizes_.size());
  for (int l = 0; l < levels(); ++l) {
    if (sizes_[l] < 1) {
      throw DimensionError(level_name(l) + " has non-positive dimension " +
                               std::to_string(sizes_[l]),
                           l);
    }
    offsets_.push_back(total_);
    total_ += sizes_[l];
  }
}

Dims Dims::tail(int first) const {
  return Dims(std::vector<int>(sizes_.begin() + first, sizes_.end()));
}

DecisionPoint DecisionPoint::zeros(const Dims& dims) {
  DecisionPoint p;
  for (int l = 0; l < dims.levels(); ++l) p.blocks.push_back(Vector::Zero(dims.size(l)));
  return p;
}

DecisionPoint DecisionPoint::from_flat(const Dims& dims, const Vector& flat) {
  if (flat.size() != dims.total()) {
    throw DimensionError("flat point has length " + std::to_string(flat.size()) + ", expected " +
                         std::to_string(dims.total()));
  }
  DecisionPoint p;
  for (int l = 0; l < dims.levels(); ++l) {
    p.blocks.push_back(flat.segment(dims.offset(l), dims.size(l)));
  }
  return p;
}

void DecisionPoint::check(const Dims& dims) const {
  if (static_cast<int>(blocks.size()) != dims.levels()) {
    throw DimensionError("point has " + std::to_string(blocks.size()) + " blocks, game has " +
                         std::to_string(dims.levels()) + " levels");
  }
  for (int l = 0; l < dims.levels(); ++l) {
    if (blocks[l].size() != dims.size(l)) {
      throw DimensionError(level_name(l) + " block has length " +
                               std::to_string(blocks[l].size()) + ", expected " +
                               std::to_string(dims.size(l)),
                           l);
    }
  }
}

Vector DecisionPoint::flatten() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.size();
  Vector out(n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

DecisionPoint DecisionPoint::tail(int first) const {
  return DecisionPoint(std::vector<Vector>(blocks.begin() + first, blocks.end()));
}

Vector BlockGradient::flatten() const { return DecisionPoint(blocks).flatten(); }

double BlockGradient::norm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

bool BlockGradient::is_zero() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const Vector& b) { return b.isZero(0.0); });
}

// ---------------------------------------------------------------------------
// QuadraticObjective

void QuadraticObjective::check_shapes(const Dims& dims) const {
  const int n = dims.levels();
  for (const auto& [jk, a] : blocks) {
    const auto [j, k] = jk;
    if (j < 0 || k < 0 || j >= n || k >= n) {
      throw DimensionError("block A(" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                               ") references a level outside 1.." + std::to_string(n),
                           std::clamp(std::max(j, k), 0, n - 1));
    }
    if (j > k) {
      throw DimensionError("block A(" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                               ") is below the diagonal; only j <= k is stored",
                           j);
    }
    if (a.rows() != dims.size(j)) {
      throw DimensionError("block A(" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                               ") has " + std::to_string(a.rows()) + " rows, expected " +
                               std::to_string(dims.size(j)),
                           j);
    }
    if (a.cols() != dims.size(k)) {
      throw DimensionError("block A(" + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                               ") has " + std::to_string(a.cols()) + " columns, expected " +
                               std::to_string(dims.size(k)),
                           k);
    }
  }
  if (!linear.empty()) {
    if (static_cast<int>(linear.size()) != n) {
      throw DimensionError("linear term has " + std::to_string(linear.size()) +
                           " blocks, expected " + std::to_string(n));
    }
    for (int l = 0; l < n; ++l) {
      if (linear[l].size() != dims.size(l)) {
        throw DimensionError("linear term of " + level_name(l) + " has length " +
                                 std::to_string(linear[l].size()) + ", expected " +
                                 std::to_string(dims.size(l)),
                             l);
      }
    }
  }
}

Matrix QuadraticObjective::hessian(const Dims& dims) const {
  Matrix h = Matrix::Zero(dims.total(), dims.total());
  for (const auto& [jk, a] : blocks) {
    const auto [j, k] = jk;
    const int oj = dims.offset(j), ok = dims.offset(k);
    if (j == k) {
      h.block(oj, oj, a.rows(), a.cols()) += a + a.transpose();
    } else {
      h.block(oj, ok, a.rows(), a.cols()) += a;
      h.block(ok, oj, a.cols(), a.rows()) += a.transpose();
    }
  }
  return h;
}

Vector QuadraticObjective::linear_term(const Dims& dims) const {
  Vector g = Vector::Zero(dims.total());
  for (size_t l = 0; l < linear.size(); ++l) {
    g.segment(dims.offset(static_cast<int>(l)), linear[l].size()) = linear[l];
  }
  return g;
}

QuadraticObjective QuadraticObjective::from_assembled(const Dims& dims, const Matrix& hessian,
                                                      const Vector& linear, double constant) {
  QuadraticObjective q;
  const int n = dims.levels();
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      Matrix a;
      if (j == k) {
        const auto hjj = hessian.block(dims.offset(j), dims.offset(j), dims.size(j), dims.size(j));
        a = 0.25 * (hjj + hjj.transpose());
      } else {
        a = hessian.block(dims.offset(j), dims.offset(k), dims.size(j), dims.size(k));
      }
      if (!a.isZero(0.0)) q.blocks.emplace(std::make_pair(j, k), std::move(a));
    }
  }
  for (int l = 0; l < n; ++l) q.linear.push_back(linear.segment(dims.offset(l), dims.size(l)));
  q.constant = constant;
  return q;
}

// ---------------------------------------------------------------------------
// Objective / constraints / problem

void Objective::check() const {
  if (const auto* q = quadratic()) {
    q->check_shapes(dims_);
  } else {
    check_vars(expr()->root, dims_);
  }
}

void LinearConstraints::check_shapes(const Dims& dims) const {
  if (static_cast<int>(a_blocks.size()) != dims.levels()) {
    throw DimensionError("constraints have " + std::to_string(a_blocks.size()) +
                         " blocks, expected " + std::to_string(dims.levels()));
  }
  for (int l = 0; l < dims.levels(); ++l) {
    const Matrix& a = a_blocks[l];
    if (a.rows() != b.size() || a.cols() != dims.size(l)) {
      throw DimensionError("constraint block of " + level_name(l) + " is " +
                               std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                               ", expected " + std::to_string(b.size()) + "x" +
                               std::to_string(dims.size(l)),
                           l);
    }
  }
}

Matrix LinearConstraints::joint(const Dims& dims) const {
  Matrix a(rows(), dims.total());
  for (int l = 0; l < dims.levels(); ++l) a.middleCols(dims.offset(l), dims.size(l)) = a_blocks[l];
  return a;
}

void GameProblem::check() const {
  if (dims.levels() < 2) throw DimensionError("a game needs at least two levels");
  if (static_cast<int>(objectives.size()) != dims.levels()) {
    throw DimensionError("game has " + std::to_string(dims.levels()) + " levels but " +
                         std::to_string(objectives.size()) + " objectives");
  }
  for (const auto& obj : objectives) {
    if (!(obj.dims() == dims)) throw DimensionError("objective dims differ from the game dims");
    obj.check();
  }
  if (constraints) constraints->check_shapes(dims);
}

double evaluate(const Objective& obj, const DecisionPoint& p) {
  const Dims& dims = obj.dims();
  p.check(dims);
  if (const auto* q = obj.quadratic()) {
    q->check_shapes(dims);
    double v = q->constant;
    for (const auto& [jk, a] : q->blocks) {
      v += p.blocks[jk.first].dot(a * p.blocks[jk.second]);
    }
    for (size_t l = 0; l < q->linear.size(); ++l) v += q->linear[l].dot(p.blocks[l]);
    return v;
  }
  const Vector x = p.flatten();
  return evaluate_expr(obj.expr()->root, dims, {x.data(), static_cast<size_t>(x.size())});
}

// ---------------------------------------------------------------------------
// validate

std::vector<Diagnostic> validate(const GameProblem& problem, const ValidateOptions& options) {
  std::vector<Diagnostic> out;
  const Dims& dims = problem.dims;
  if (dims.levels() < 2) out.push_back({Severity::kError, -1, "a game needs at least two levels"});
  if (static_cast<int>(problem.objectives.size()) != dims.levels()) {
    out.push_back({Severity::kError, -1,
                   "expected " + std::to_string(dims.levels()) + " objectives, got " +
                       std::to_string(problem.objectives.size())});
  }
  for (int i = 0; i < static_cast<int>(problem.objectives.size()); ++i) {
    const Objective& obj = problem.objectives[i];
    if (!(obj.dims() == dims)) {
      out.push_back({Severity::kError, i, "objective dims differ from the game dims"});
      continue;
    }
    try {
      obj.check();
    } catch (const DimensionError& e) {
      out.push_back({Severity::kError, i, e.what()});
      continue;
    }
    const auto* q = obj.quadratic();
    if (q == nullptr) continue;
    for (const auto& [jk, a] : q->blocks) {
      const auto [j, k] = jk;
      const std::string name = "A(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
      if (j == k) {
        const double skew = (a - a.transpose()).cwiseAbs().maxCoeff();
        if (skew > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
          out.push_back({Severity::kWarning, i, name + " is not symmetric"});
        }
        const Matrix sym = 0.5 * (a + a.transpose());
        Eigen::LLT<Matrix> llt(sym);
        if (llt.info() != Eigen::Success) {
          out.push_back({Severity::kWarning, i, name + " is not positive definite"});
        }
      } else if (options.note_cross_blocks && (j == i || k == i) && !a.isZero(0.0)) {
        out.push_back({Severity::kInfo, i, name + " couples the player's own variable"});
      }
    }
    for (int l = 0; l < dims.levels(); ++l) {
      if (q->blocks.find({l, l}) == q->blocks.end()) {
        out.push_back({Severity::kWarning, i,
                       "A(" + std::to_string(l + 1) + "," + std::to_string(l + 1) +
                           ") is absent, so not positive definite"});
      }
    }
  }
  if (problem.constraints) {
    try {
      problem.constraints->check_shapes(dims);
    } catch (const DimensionError& e) {
      out.push_back({Severity::kError, -1, e.what()});
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

// ---------------------------------------------------------------------------
// quadratic_to_expr

ExprObjective quadratic_to_expr(const QuadraticObjective& q, const Dims& dims) {
  q.check_shapes(dims);
  std::vector<Expr> terms;
  for (const auto& [jk, a] : q.blocks) {
    const auto [j, k] = jk;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double coef = a(r, c);
        if (coef == 0.0) continue;
        terms.push_back(Expr::product({Expr::constant(coef), Expr::var(j, static_cast<int>(r)),
                                       Expr::var(k, static_cast<int>(c))}));
      }
    }
  }
  for (size_t l = 0; l < q.linear.size(); ++l) {
    for (Eigen::Index r = 0; r < q.linear[l].size(); ++r) {
      const double coef = q.linear[l](r);
      if (coef == 0.0) continue;
      terms.push_back(
          Expr::product({Expr::constant(coef), Expr::var(static_cast<int>(l), static_cast<int>(r))}));
    }
  }
  if (q.constant != 0.0) terms.push_back(Expr::constant(q.constant));
  return ExprObjective{Expr::sum(std::move(terms))};
}

// ---------------------------------------------------------------------------
// ObjectiveEvaluator

ObjectiveEvaluator::ObjectiveEvaluator(const Objective& obj) : n_(obj.dims().total()) {
  obj.check();
  if (const auto* q = obj.quadratic()) {
    quadratic_ = true;
    hessian_ = q->hessian(obj.dims());
    linear_ = q->linear_term(obj.dims());
    constant_ = q->constant;
  } else {
    compiled_.emplace(obj.expr()->root, obj.dims());
    stack_.reserve(64);
  }
}

double ObjectiveEvaluator::operator()(const double* x) {
  if (quadratic_) {
    double quad = 0.0, lin = 0.0;
    for (int c = 0; c < n_; ++c) {
      const double* col = hessian_.data() + static_cast<Eigen::Index>(c) * n_;
      double s = 0.0;
      for (int r = 0; r < n_; ++r) s += col[r] * x[r];
      quad += s * x[c];
      lin += linear_[c] * x[c];
    }
    return 0.5 * quad + lin + constant_;
  }
  return (*compiled_)(x, stack_);
}

}  // namespace revstack
