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

// Supporting hyperplanes of follower sublevel sets at the desired point, the
// gradient conditions under which an affine strategy exists, and sampled
// evidence for the nonconvex case.

#ifndef REVSTACK_GEOMETRY_HPP_
#define REVSTACK_GEOMETRY_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "revstack/calculus.hpp"
#include "revstack/model.hpp"

namespace revstack {

// Hyperplane <normal, x - point> = 0. The sublevel set of the objective it was
// built from lies on the side <normal, x - point> <= 0.
struct SupportingHyperplane {
  DecisionPoint point;
  BlockGradient normal;

  // <normal, x - point>.
  double signed_distance(const DecisionPoint& x) const;
  double signed_distance_flat(const Vector& x) const;
};

// Default degeneracy threshold for gradient-nonzero checks: 1e-8 (1 + |g|).
double default_gradient_tol(const BlockGradient& g);

// Throws ZeroGradientError when |grad J(p)| <= tol (tol < 0 selects the default).
SupportingHyperplane supporting_hyperplane_at(const Objective& obj, const DecisionPoint& p,
                                              double tol = -1.0);

struct ExistenceVerdict {
  bool passed = false;
  // Norm of the partial gradient with respect to the strategy owner's variable.
  double block_norm = 0.0;
  double tol = 0.0;
  // Human-readable statement of the checked condition.
  std::string condition;
  std::string reason;
  // Advisory only: whether the follower Hessian certifies local strict convexity.
  std::optional<ConvexityVerdict> convexity;
};

// Passes iff the follower objective is sensitive to the first block at the
// anchor, |d follower / d u^first (anchor)| > tol. tol < 0 selects the default.
ExistenceVerdict existence_check(const Objective& follower, const DecisionPoint& anchor,
                                 double tol = -1.0);

// Leader condition: the second objective of `problem` must depend on the
// top-level decision at the desired point d.
ExistenceVerdict leader_existence_check(const GameProblem& problem, const DecisionPoint& d,
                                        double tol = -1.0);

// Middle condition: the third objective after substituting the leader strategy
// (see reduce_problem) must depend on the middle decision at d23.
ExistenceVerdict middle_existence_check(const Objective& reduced_follower,
                                        const DecisionPoint& d23, double tol = -1.0);

// Radial law for ball sampling. kMultiScale draws the radius log-uniformly over
// six decades below `radius`, so every scale around the anchor is probed;
// kUniform draws uniformly by volume.
enum class RadialLaw { kMultiScale, kUniform };

struct BallSampler {
  int count = 10000;
  double radius = 5.0;
  std::uint64_t seed = 0;
  RadialLaw law = RadialLaw::kMultiScale;
};

// Deterministic stream of points in a ball, seeded explicitly.
class BallStream {
 public:
  BallStream(const Vector& center, double radius, std::uint64_t seed, RadialLaw law);
  Vector next();

 private:
  Vector center_;
  double radius_;
  RadialLaw law_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct SublevelProbe {
  Objective objective;
  DecisionPoint anchor;
  double threshold;  // evaluate(objective, anchor), exactly
};

SublevelProbe make_probe(const Objective& objective, const DecisionPoint& anchor);

enum class ProbeVerdict { kConsistent, kRefuted };

struct ExposedPointResult {
  ProbeVerdict verdict = ProbeVerdict::kConsistent;
  int samples = 0;
  int samples_in_set = 0;
  int violations = 0;
  std::optional<DecisionPoint> witness;  // first violating sample
};

// Monte-Carlo evidence that the anchor is exposed by `plane`: every sampled
// point of the sublevel set other than the anchor must lie strictly on the
// negative side. Any violation refutes; otherwise the result is only
// consistent, not a proof.
ExposedPointResult exposed_point_probe(const SublevelProbe& probe,
                                       const SupportingHyperplane& plane,
                                       const BallSampler& sampler);

}  // namespace revstack

#endif  // REVSTACK_GEOMETRY_HPP_
