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

// Independent checks that announced strategies induce the desired point: a
// brute-force best-response oracle (grid plus compass refinement), sampled
// sublevel inequalities, and the aggregated verification report.

#ifndef REVSTACK_VERIFY_HPP_
#define REVSTACK_VERIFY_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revstack/geometry.hpp"
#include "revstack/model.hpp"
#include "revstack/synthesis.hpp"

namespace revstack {

struct GridSpec {
  // Half-width of the default box around the desired point.
  double radius = 10.0;
  // Explicit (lower, upper) per free coordinate; overrides `radius` when set.
  std::vector<std::pair<double, double>> bounds;
  int points = 41;
  bool refine = true;
  int refine_iterations = 60;
  double refine_factor = 0.5;
  // Grid size cap. Above it the points per axis drop in steps of two.
  long long max_evaluations = 2'000'000;
  int threads = 1;
};

struct OracleResult {
  DecisionPoint point;       // blocks level .. n-1
  double value = 0.0;
  DecisionPoint grid_point;  // best grid point before refinement
  int points_per_axis = 0;
  long long evaluations = 0;
  // Largest refinement move, in grid spacings.
  double refinement_shift = 0.0;
  // Refinement moved more than two spacings away from the best grid point.
  bool low_confidence = false;
};

// Full decision point from the free blocks of levels `level` .. n-1, filling
// the levels above through `announced` bottom-up. announced[i] must belong to
// level first_level + i.
DecisionPoint lift(const GameProblem& problem, std::span<const AffineStrategy> announced,
                   int level, const DecisionPoint& free);

// Minimizes objective `level` (0-based, >= 1) over the free blocks after
// substituting the strategies of all levels above. Deterministic; ties go to
// the lexicographically smallest grid index.
OracleResult oracle_best_response(const GameProblem& problem,
                                  std::span<const AffineStrategy> announced, int level,
                                  const GridSpec& grid = {});

struct SublevelStats {
  int samples = 0;
  int violations = 0;
  double threshold = 0.0;
  double min_value = 0.0;
  Vector min_point;  // follower point (flat) attaining min_value
};

// Samples follower points around the probe anchor's lower blocks, lifts them
// through `strategy` and counts J < threshold - tol. The probe objective and
// anchor live on the stage whose top level owns `strategy`.
SublevelStats sublevel_inequality_check(const SublevelProbe& probe,
                                        const AffineStrategy& strategy,
                                        const BallSampler& sampler, double tol);

struct SamplingOptions {
  int hyperplane_samples = 100;
  std::uint64_t seed = 0;
  BallSampler sublevel{};
};

struct LevelReport {
  int level = 0;  // owner of the strategy
  std::optional<ExistenceVerdict> existence;
  std::string existence_error;
  double realization_residual = 0.0;
  bool realization_ok = false;
  HyperplaneCheck hyperplane;
  // Oracle for the follower level + 1.
  OracleResult oracle;
  double argmin_distance = 0.0;
  bool argmin_ok = false;
  double chain_residual = 0.0;
  bool chain_ok = false;
  SublevelStats sublevel;
};

struct VerificationReport {
  DecisionPoint desired;
  double tol = 0.0;
  std::vector<LevelReport> levels;
  bool verified = false;
  std::vector<std::string> reasons;
};

// strategies[i] must belong to level i and share the desired point. Checks
// realization, hyperplane membership, oracle argmin, the strategy chain and
// sublevel sampling, in that order.
VerificationReport verify_full(const GameProblem& problem,
                               std::span<const AffineStrategy> strategies, double tol = 1e-4,
                               const GridSpec& grid = {}, const SamplingOptions& sampling = {});

}  // namespace revstack

#endif  // REVSTACK_VERIFY_HPP_
