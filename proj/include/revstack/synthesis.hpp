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

// Affine reverse Stackelberg strategies: the rank-one construction, the full
// parametric family, substitution of a strategy into the game below it, and
// the level-by-level cascade.

#ifndef REVSTACK_SYNTHESIS_HPP_
#define REVSTACK_SYNTHESIS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "revstack/model.hpp"

namespace revstack {

// u^l = u^{ld} + shift - sum_{j>l} Q_j (u^j - u^{jd}).
// Constructed strategies have shift = 0; strategies read from offset form
// (u^l = offset - sum Q_j u^j) carry whatever shift the offset implies.
struct AffineStrategy {
  int level = 0;                   // absolute 0-based level of the owner
  Vector anchor;                   // u^{ld}
  std::vector<Vector> lower_anchor;  // u^{jd} for j = level+1 .. n-1
  std::vector<Matrix> coeffs;      // Q_j, m_l x m_j, same order as lower_anchor
  Vector shift;

  static AffineStrategy from_offset(int level, const DecisionPoint& desired, const Vector& offset,
                                    std::vector<Matrix> coeffs);

  int lower_levels() const { return static_cast<int>(coeffs.size()); }
  // `lower` holds the blocks of levels level+1 .. n-1.
  Vector evaluate(std::span<const Vector> lower) const;
  // The constant term c in u^l = c - sum Q_j u^j.
  Vector offset() const;
  // |gamma(lower anchors) - u^{ld}|.
  double realization_residual() const;
  double coeff_norm() const;  // Frobenius norm over all Q_j
  // Throws DimensionError if shapes disagree with `dims`, whose level 0 is
  // the absolute level `first_level`.
  void check(const Dims& dims, int first_level = 0) const;
};

// Gradients of the level-(l+2) objective after the level-l strategy is
// substituted: ubar[k] = grad_{u^{l+1+k}} J - Q_{l+1+k}' grad_{u^l} J at d.
struct ReducedGradients {
  std::vector<Vector> ubar;
};

// Max |<n, (gamma(y) - u^{ld}, y - y^d)>| over sampled follower points y,
// where n is the gradient of the next objective at the desired point.
struct HyperplaneCheck {
  double max_residual = 0.0;
  double scale = 0.0;  // max over samples of sum |n_i (x_i - d_i)|
  int samples = 0;
  bool passed = false;  // max_residual <= 1e-9 (1 + scale)
};

// `stage` has the strategy owner on top (stage.first_level == strategy.level);
// `d` is the desired point restricted to the stage's levels.
HyperplaneCheck hyperplane_membership(const GameProblem& stage, const AffineStrategy& strategy,
                                      const DecisionPoint& d, int samples = 100,
                                      std::uint64_t seed = 0, double radius = 10.0);

// Rank-one strategy Q_j = g_1 g_j' / <g_1, g_1> with g = grad J_{top+1}(d).
// Throws SynthesisError if the existence check fails or the post-hoc
// hyperplane check does not pass.
AffineStrategy synthesize_single_leader(const GameProblem& problem, const DecisionPoint& d);

ReducedGradients reduced_gradients(const GameProblem& problem, const AffineStrategy& leader,
                                   const DecisionPoint& d);

// Middle strategy from the chain-rule gradients of the third objective.
// Throws SynthesisError when ubar[0] vanishes.
AffineStrategy synthesize_single_middle(const GameProblem& problem, const AffineStrategy& leader,
                                        const DecisionPoint& d);

// All strategies whose graph lies on the follower's supporting hyperplane:
// Q_j = R_j + B_N T_j with free T_j of shape (m_l - 1) x m_j.
struct StrategyFamily {
  int level = 0;
  Vector anchor;
  std::vector<Vector> lower_anchor;
  Vector normal;                     // g_1
  std::vector<Matrix> particular;    // R_j, the rank-one solution
  Matrix null_basis;                 // B_N, m_l x (m_l - 1), orthonormal columns

  int parameter_rows() const { return static_cast<int>(null_basis.cols()); }
  std::vector<Matrix> zero_parameters() const;
};

StrategyFamily synthesize_family_leader(const GameProblem& problem, const DecisionPoint& d);

// Throws DimensionError on parameter shape mismatch.
AffineStrategy instantiate(const StrategyFamily& family, std::span<const Matrix> params);

struct MembershipResult {
  std::vector<Matrix> params;
  double residual = 0.0;  // Frobenius norm of reconstruction - coeffs
};

// Least-squares parameters reproducing `coeffs`; the residual is zero iff
// the coefficients belong to the family.
MembershipResult family_membership(const StrategyFamily& family, std::span<const Matrix> coeffs);

struct MinFrobenius {};
struct CustomScore {
  std::vector<std::vector<Matrix>> grid;
  std::function<double(const AffineStrategy&, const std::vector<Matrix>&)> score;
};
using SelectionCriterion = std::variant<MinFrobenius, CustomScore>;

// Lowest score wins; ties go to the earliest grid entry. Throws
// std::invalid_argument on an empty grid.
std::vector<Matrix> select_parameters(const StrategyFamily& family,
                                      const SelectionCriterion& criterion);

// Substitutes the top strategy into objectives 2..n and the constraints,
// yielding a game one level shorter. Requires at least three levels and
// leader.level == problem.first_level.
GameProblem reduce_problem(const GameProblem& problem, const AffineStrategy& leader);

// Strategies for levels first .. n-2 of `problem`. If `top` is given it is
// used for the first stage instead of the rank-one construction. Throws
// SynthesisError naming the failed stage.
std::vector<AffineStrategy> synthesize_cascade(const GameProblem& problem, const DecisionPoint& d,
                                               const std::optional<AffineStrategy>& top = {});

// Uses desired_equilibrium for the desired point.
std::vector<AffineStrategy> synthesize_cascade(const GameProblem& problem);

}  // namespace revstack

#endif  // REVSTACK_SYNTHESIS_HPP_
