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

#include "revstack/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "revstack/error.hpp"

namespace revstack {

double SupportingHyperplane::signed_distance(const DecisionPoint& x) const {
  double s = 0.0;
  for (size_t l = 0; l < normal.blocks.size(); ++l) {
    s += normal.blocks[l].dot(x.blocks[l] - point.blocks[l]);
  }
  return s;
}

double SupportingHyperplane::signed_distance_flat(const Vector& x) const {
  return normal.flatten().dot(x - point.flatten());
}

double default_gradient_tol(const BlockGradient& g) { return 1e-8 * (1.0 + g.norm()); }

SupportingHyperplane supporting_hyperplane_at(const Objective& obj, const DecisionPoint& p,
                                              double tol) {
  BlockGradient g = gradient(obj, p);
  if (tol < 0.0) tol = default_gradient_tol(g);
  if (!(g.norm() > tol)) {
    throw ZeroGradientError("no supporting hyperplane from gradient: gradient norm " +
                            std::to_string(g.norm()) + " is within tolerance");
  }
  return {p, std::move(g)};
}

ExistenceVerdict existence_check(const Objective& follower, const DecisionPoint& anchor,
                                 double tol) {
  const BlockGradient g = gradient(follower, anchor);
  ExistenceVerdict v;
  v.tol = tol < 0.0 ? default_gradient_tol(g) : tol;
  v.block_norm = g.blocks.front().norm();
  v.passed = v.block_norm > v.tol;
  if (!v.passed) {
    v.reason = "the follower objective is not sensitive to the strategy owner's decision at "
               "the desired point, so no affine strategy can steer it";
  }
  const double ctol = 1e-8;
  v.convexity = strict_convexity_probe(follower, anchor, ctol);
  return v;
}

ExistenceVerdict leader_existence_check(const GameProblem& problem, const DecisionPoint& d,
                                        double tol) {
  problem.check();
  ExistenceVerdict v = existence_check(problem.objectives.at(1), d, tol);
  const std::string top = std::to_string(problem.first_level + 1);
  const std::string next = std::to_string(problem.first_level + 2);
  v.condition = std::string(problem.first_level > 0 ? "gradient of the reduced J" : "gradient of J") +
                next + " with respect to u" + top + " at the desired point is nonzero";
  return v;
}

ExistenceVerdict middle_existence_check(const Objective& reduced_follower,
                                        const DecisionPoint& d23, double tol) {
  ExistenceVerdict v = existence_check(reduced_follower, d23, tol);
  v.condition =
      "gradient of the reduced follower objective with respect to the middle decision at the "
      "desired point is nonzero";
  return v;
}

BallStream::BallStream(const Vector& center, double radius, std::uint64_t seed, RadialLaw law)
    : center_(center), radius_(radius), law_(law), rng_(seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("sampling radius must be positive");
}

Vector BallStream::next() {
  const Eigen::Index n = center_.size();
  Vector dir(n);
  double len = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) dir[i] = normal_(rng_);
    len = dir.norm();
  } while (len == 0.0);
  dir /= len;
  const double u = uniform_(rng_);
  double r = 0.0;
  if (law_ == RadialLaw::kUniform) {
    r = radius_ * std::pow(u, 1.0 / static_cast<double>(n));
  } else {
    r = radius_ * std::pow(10.0, -6.0 * u);
  }
  return center_ + r * dir;
}

SublevelProbe make_probe(const Objective& objective, const DecisionPoint& anchor) {
  return SublevelProbe{objective, anchor, evaluate(objective, anchor)};
}

ExposedPointResult exposed_point_probe(const SublevelProbe& probe,
                                       const SupportingHyperplane& plane,
                                       const BallSampler& sampler) {
  if (sampler.count < 1) throw std::invalid_argument("sampler count must be at least 1");
  const Dims& dims = probe.objective.dims();
  probe.anchor.check(dims);
  plane.point.check(dims);
  const Vector anchor = probe.anchor.flatten();
  const Vector normal = plane.normal.flatten();
  const Vector base = plane.point.flatten();
  ObjectiveEvaluator f(probe.objective);
  BallStream stream(anchor, sampler.radius, sampler.seed, sampler.law);

  ExposedPointResult out;
  for (int i = 0; i < sampler.count; ++i) {
    const Vector x = stream.next();
    ++out.samples;
    if (x == anchor || !(f(x) <= probe.threshold)) continue;
    ++out.samples_in_set;
    if (!(normal.dot(x - base) < 0.0)) {
      ++out.violations;
      if (!out.witness) out.witness = DecisionPoint::from_flat(dims, x);
    }
  }
  out.verdict = out.violations > 0 ? ProbeVerdict::kRefuted : ProbeVerdict::kConsistent;
  return out;
}

}  // namespace revstack
