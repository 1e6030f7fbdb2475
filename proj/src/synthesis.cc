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

#include "revstack/synthesis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

#include "revstack/calculus.hpp"
#include "revstack/equilibrium.hpp"
#include "revstack/error.hpp"
#include "revstack/geometry.hpp"

namespace revstack {

// ---------------------------------------------------------------------------
// AffineStrategy

AffineStrategy AffineStrategy::from_offset(int level, const DecisionPoint& desired,
                                           const Vector& offset, std::vector<Matrix> coeffs) {
  const int n = static_cast<int>(desired.blocks.size());
  if (level < 0 || level >= n - 1) {
    throw DimensionError("strategy level " + std::to_string(level + 1) + " has no lower levels",
                         level);
  }
  AffineStrategy s;
  s.level = level;
  s.anchor = desired.blocks[level];
  for (int j = level + 1; j < n; ++j) s.lower_anchor.push_back(desired.blocks[j]);
  s.coeffs = std::move(coeffs);
  s.shift = Vector::Zero(s.anchor.size());
  s.check(Dims([&] {
    std::vector<int> sizes;
    for (const auto& b : desired.blocks) sizes.push_back(static_cast<int>(b.size()));
    return sizes;
  }()));
  if (offset.size() != s.anchor.size()) {
    throw DimensionError("strategy offset for level " + std::to_string(level + 1) + " has " +
                             std::to_string(offset.size()) + " entries, expected " +
                             std::to_string(s.anchor.size()),
                         level);
  }
  Vector c = offset;
  for (int k = 0; k < s.lower_levels(); ++k) c -= s.coeffs[k] * s.lower_anchor[k];
  s.shift = c - s.anchor;
  return s;
}

Vector AffineStrategy::evaluate(std::span<const Vector> lower) const {
  if (static_cast<int>(lower.size()) != lower_levels()) {
    throw DimensionError("strategy expects " + std::to_string(lower_levels()) + " lower blocks",
                         level);
  }
  Vector u = anchor + shift;
  for (int k = 0; k < lower_levels(); ++k) {
    if (lower[k].size() != lower_anchor[k].size()) {
      throw DimensionError("lower block " + std::to_string(level + k + 2) + " has wrong length",
                           level + k + 1);
    }
    u.noalias() -= coeffs[k] * (lower[k] - lower_anchor[k]);
  }
  return u;
}

Vector AffineStrategy::offset() const {
  Vector c = anchor + shift;
  for (int k = 0; k < lower_levels(); ++k) c += coeffs[k] * lower_anchor[k];
  return c;
}

double AffineStrategy::realization_residual() const {
  return (evaluate(lower_anchor) - anchor).norm();
}

double AffineStrategy::coeff_norm() const {
  double s = 0.0;
  for (const auto& q : coeffs) s += q.squaredNorm();
  return std::sqrt(s);
}

void AffineStrategy::check(const Dims& dims, int first_level) const {
  const int rel = level - first_level;
  if (rel < 0 || rel >= dims.levels() - 1) {
    throw DimensionError("strategy level " + std::to_string(level + 1) +
                             " is not a leader level of this game",
                         level);
  }
  if (anchor.size() != dims.size(rel) || shift.size() != dims.size(rel)) {
    throw DimensionError("strategy for level " + std::to_string(level + 1) +
                             " has the wrong own-block length",
                         level);
  }
  const int lower = dims.levels() - rel - 1;
  if (lower_levels() != lower || static_cast<int>(lower_anchor.size()) != lower) {
    throw DimensionError("strategy for level " + std::to_string(level + 1) + " needs " +
                             std::to_string(lower) + " coefficient matrices",
                         level);
  }
  for (int k = 0; k < lower; ++k) {
    const int m = dims.size(rel + 1 + k);
    if (coeffs[k].rows() != anchor.size() || coeffs[k].cols() != m ||
        lower_anchor[k].size() != m) {
      throw DimensionError("coefficient matrix Q for level " + std::to_string(level + k + 2) +
                               " of the level-" + std::to_string(level + 1) +
                               " strategy must be " + std::to_string(anchor.size()) + "x" +
                               std::to_string(m),
                           level + k + 1);
    }
  }
}

// ---------------------------------------------------------------------------
// Construction

namespace {

AffineStrategy blank_strategy(const GameProblem& problem, const DecisionPoint& d) {
  AffineStrategy s;
  s.level = problem.first_level;
  s.anchor = d.blocks[0];
  s.lower_anchor.assign(d.blocks.begin() + 1, d.blocks.end());
  s.shift = Vector::Zero(s.anchor.size());
  return s;
}

// Q_j = a b_j' / <a, a>.
std::vector<Matrix> rank_one(const Vector& a, std::span<const Vector> b) {
  const double aa = a.squaredNorm();
  std::vector<Matrix> out;
  for (const Vector& bj : b) out.push_back(a * bj.transpose() / aa);
  return out;
}

std::string level_name(int level) { return "u" + std::to_string(level + 1); }

}  // namespace

HyperplaneCheck hyperplane_membership(const GameProblem& stage, const AffineStrategy& strategy,
                                      const DecisionPoint& d, int samples, std::uint64_t seed,
                                      double radius) {
  stage.check();
  d.check(stage.dims);
  strategy.check(stage.dims, stage.first_level);
  const BlockGradient n = gradient(stage.objectives.at(1), d);
  const Vector lower_d = d.tail(1).flatten();
  const Dims lower_dims = stage.dims.tail(1);
  BallStream stream(lower_d, radius, seed, RadialLaw::kUniform);

  HyperplaneCheck out;
  for (int i = 0; i < samples; ++i) {
    const DecisionPoint y = DecisionPoint::from_flat(lower_dims, stream.next());
    const Vector top = strategy.evaluate(y.blocks);
    double r = n.blocks[0].dot(top - d.blocks[0]);
    double scale = (n.blocks[0].cwiseProduct(top - d.blocks[0])).cwiseAbs().sum();
    for (size_t k = 0; k < y.blocks.size(); ++k) {
      const Vector delta = y.blocks[k] - d.blocks[k + 1];
      r += n.blocks[k + 1].dot(delta);
      scale += n.blocks[k + 1].cwiseProduct(delta).cwiseAbs().sum();
    }
    out.max_residual = std::max(out.max_residual, std::abs(r));
    out.scale = std::max(out.scale, scale);
    ++out.samples;
  }
  out.passed = out.max_residual <= 1e-9 * (1.0 + out.scale);
  return out;
}

AffineStrategy synthesize_single_leader(const GameProblem& problem, const DecisionPoint& d) {
  problem.check();
  d.check(problem.dims);
  const ExistenceVerdict v = leader_existence_check(problem, d);
  if (!v.passed) {
    throw SynthesisError(problem.first_level, v.condition,
                         "no affine strategy for " + level_name(problem.first_level) + ": " +
                             v.condition + " fails (norm " + std::to_string(v.block_norm) + ")");
  }
  const BlockGradient g = gradient(problem.objectives[1], d);
  AffineStrategy s = blank_strategy(problem, d);
  s.coeffs = rank_one(g.blocks[0], std::span(g.blocks).subspan(1));
  const HyperplaneCheck h = hyperplane_membership(problem, s, d);
  if (!h.passed) {
    throw SynthesisError(problem.first_level, "strategy graph lies on the supporting hyperplane",
                         "constructed strategy for " + level_name(problem.first_level) +
                             " misses the supporting hyperplane (residual " +
                             std::to_string(h.max_residual) + ")");
  }
  return s;
}

ReducedGradients reduced_gradients(const GameProblem& problem, const AffineStrategy& leader,
                                   const DecisionPoint& d) {
  problem.check();
  d.check(problem.dims);
  if (problem.levels() < 3) {
    throw std::invalid_argument("reduced gradients need at least three levels");
  }
  leader.check(problem.dims, problem.first_level);
  const BlockGradient g = gradient(problem.objectives[2], d);
  ReducedGradients r;
  for (int k = 0; k < leader.lower_levels(); ++k) {
    r.ubar.push_back(g.blocks[k + 1] - leader.coeffs[k].transpose() * g.blocks[0]);
  }
  return r;
}

AffineStrategy synthesize_single_middle(const GameProblem& problem, const AffineStrategy& leader,
                                        const DecisionPoint& d) {
  const ReducedGradients r = reduced_gradients(problem, leader, d);
  BlockGradient all{r.ubar};
  const double tol = default_gradient_tol(all);
  const int level = problem.first_level + 1;
  if (!(r.ubar[0].norm() > tol)) {
    throw SynthesisError(level, "reduced gradient of J" + std::to_string(level + 2) +
                                    " with respect to " + level_name(level) + " is nonzero",
                         "middle-level strategy not constructible by this method: the reduced "
                         "gradient with respect to " +
                             level_name(level) + " vanishes at the desired point");
  }
  AffineStrategy s;
  s.level = level;
  s.anchor = d.blocks[1];
  s.lower_anchor.assign(d.blocks.begin() + 2, d.blocks.end());
  s.shift = Vector::Zero(s.anchor.size());
  s.coeffs = rank_one(r.ubar[0], std::span(r.ubar).subspan(1));
  return s;
}

// ---------------------------------------------------------------------------
// Family

std::vector<Matrix> StrategyFamily::zero_parameters() const {
  std::vector<Matrix> t;
  for (const Matrix& r : particular) t.push_back(Matrix::Zero(parameter_rows(), r.cols()));
  return t;
}

StrategyFamily synthesize_family_leader(const GameProblem& problem, const DecisionPoint& d) {
  const AffineStrategy single = synthesize_single_leader(problem, d);
  const BlockGradient g = gradient(problem.objectives[1], d);
  StrategyFamily f;
  f.level = single.level;
  f.anchor = single.anchor;
  f.lower_anchor = single.lower_anchor;
  f.normal = g.blocks[0];
  f.particular = single.coeffs;
  const Eigen::Index m = f.normal.size();
  Eigen::HouseholderQR<Matrix> qr(Matrix(f.normal));
  const Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  f.null_basis = q.rightCols(m - 1);
  return f;
}

AffineStrategy instantiate(const StrategyFamily& family, std::span<const Matrix> params) {
  if (params.size() != family.particular.size()) {
    throw DimensionError("family needs " + std::to_string(family.particular.size()) +
                             " parameter matrices, got " + std::to_string(params.size()),
                         family.level);
  }
  AffineStrategy s;
  s.level = family.level;
  s.anchor = family.anchor;
  s.lower_anchor = family.lower_anchor;
  s.shift = Vector::Zero(family.anchor.size());
  for (size_t k = 0; k < params.size(); ++k) {
    const Matrix& r = family.particular[k];
    if (params[k].rows() != family.parameter_rows() || params[k].cols() != r.cols()) {
      throw DimensionError("parameter " + std::to_string(k + 1) + " must be " +
                               std::to_string(family.parameter_rows()) + "x" +
                               std::to_string(r.cols()),
                           family.level + static_cast<int>(k) + 1);
    }
    s.coeffs.push_back(r + family.null_basis * params[k]);
  }
  return s;
}

MembershipResult family_membership(const StrategyFamily& family, std::span<const Matrix> coeffs) {
  if (coeffs.size() != family.particular.size()) {
    throw DimensionError("membership needs " + std::to_string(family.particular.size()) +
                             " coefficient matrices",
                         family.level);
  }
  MembershipResult out;
  double res2 = 0.0;
  for (size_t k = 0; k < coeffs.size(); ++k) {
    const Matrix& r = family.particular[k];
    if (coeffs[k].rows() != r.rows() || coeffs[k].cols() != r.cols()) {
      throw DimensionError("coefficient matrix " + std::to_string(k + 1) + " has wrong shape",
                           family.level + static_cast<int>(k) + 1);
    }
    // B_N has orthonormal columns, so B_N' is its least-squares inverse.
    Matrix t = family.null_basis.transpose() * (coeffs[k] - r);
    res2 += (r + family.null_basis * t - coeffs[k]).squaredNorm();
    out.params.push_back(std::move(t));
  }
  out.residual = std::sqrt(res2);
  return out;
}

std::vector<Matrix> select_parameters(const StrategyFamily& family,
                                      const SelectionCriterion& criterion) {
  if (std::holds_alternative<MinFrobenius>(criterion)) return family.zero_parameters();
  const CustomScore& custom = std::get<CustomScore>(criterion);
  if (custom.grid.empty()) throw std::invalid_argument("parameter grid is empty");
  if (!custom.score) throw std::invalid_argument("custom criterion has no score function");
  size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < custom.grid.size(); ++i) {
    const double s = custom.score(instantiate(family, custom.grid[i]), custom.grid[i]);
    if (s < best_score) {
      best_score = s;
      best = i;
    }
  }
  return custom.grid[best];
}

// ---------------------------------------------------------------------------
// Reduction and cascade

GameProblem reduce_problem(const GameProblem& problem, const AffineStrategy& leader) {
  problem.check();
  if (problem.levels() < 3) {
    throw std::invalid_argument("reduction needs at least three levels");
  }
  if (leader.level != problem.first_level) {
    throw std::invalid_argument("reduction substitutes the top strategy only");
  }
  leader.check(problem.dims, problem.first_level);
  const Dims& dims = problem.dims;
  const Dims nd = dims.tail(1);
  const Vector c = leader.offset();
  const int m0 = dims.size(0);

  // x = S y + t.
  Matrix s = Matrix::Zero(dims.total(), nd.total());
  s.bottomRows(nd.total()).setIdentity();
  for (int k = 0; k < nd.levels(); ++k) {
    s.block(0, nd.offset(k), m0, nd.size(k)) = -leader.coeffs[k];
  }
  Vector t = Vector::Zero(dims.total());
  t.head(m0) = c;

  GameProblem out{nd, {}, std::nullopt, problem.first_level + 1};
  for (size_t i = 1; i < problem.objectives.size(); ++i) {
    const Objective& obj = problem.objectives[i];
    if (const auto* q = obj.quadratic()) {
      const Matrix h = q->hessian(dims);
      const Vector l = q->linear_term(dims);
      const Vector ht = h * t;
      out.objectives.emplace_back(
          nd, QuadraticObjective::from_assembled(nd, s.transpose() * h * s,
                                                 s.transpose() * (ht + l),
                                                 0.5 * t.dot(ht) + l.dot(t) + q->constant));
    } else {
      std::vector<Expr> top;
      for (int r = 0; r < m0; ++r) {
        std::vector<Expr> terms{Expr::constant(c[r])};
        for (int k = 0; k < nd.levels(); ++k) {
          for (int col = 0; col < nd.size(k); ++col) {
            const double a = leader.coeffs[k](r, col);
            if (a != 0.0) {
              terms.push_back(Expr::product({Expr::constant(-a), Expr::var(k, col)}));
            }
          }
        }
        top.push_back(Expr::sum(std::move(terms)));
      }
      Expr e = substitute(obj.expr()->root, [&](int level, int index) -> std::optional<Expr> {
        if (level == 0) return top[index];
        return Expr::var(level - 1, index);
      });
      out.objectives.emplace_back(nd, ExprObjective{std::move(e)});
    }
  }
  if (problem.constraints) {
    const LinearConstraints& lc = *problem.constraints;
    LinearConstraints r;
    const Matrix& a0 = lc.a_blocks[0];
    for (int k = 0; k < nd.levels(); ++k) {
      r.a_blocks.push_back(lc.a_blocks[k + 1] - a0 * leader.coeffs[k]);
    }
    r.b = lc.b - a0 * c;
    out.constraints = std::move(r);
  }
  return out;
}

std::vector<AffineStrategy> synthesize_cascade(const GameProblem& problem, const DecisionPoint& d,
                                               const std::optional<AffineStrategy>& top) {
  problem.check();
  d.check(problem.dims);
  std::vector<AffineStrategy> out;
  GameProblem stage = problem;
  DecisionPoint ds = d;
  while (true) {
    AffineStrategy s;
    if (out.empty() && top) {
      top->check(stage.dims, stage.first_level);
      s = *top;
    } else {
      s = synthesize_single_leader(stage, ds);
    }
    out.push_back(s);
    if (stage.levels() == 2) break;
    stage = reduce_problem(stage, s);
    ds = ds.tail(1);
  }
  return out;
}

std::vector<AffineStrategy> synthesize_cascade(const GameProblem& problem) {
  return synthesize_cascade(problem, desired_equilibrium(problem).point);
}

}  // namespace revstack
