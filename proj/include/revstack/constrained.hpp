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

// Whether an affine strategy maps the lower-level decision region into the
// owner's own feasible set, and the same check swept over a strategy family.

#ifndef REVSTACK_CONSTRAINED_HPP_
#define REVSTACK_CONSTRAINED_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "revstack/model.hpp"
#include "revstack/synthesis.hpp"

namespace revstack {

enum class FeasibilityMethod { kLpExact };

const char* to_string(FeasibilityMethod method);

struct FeasibilityVerdict {
  bool feasible = true;
  // Index of the row with the largest margin; -1 when there are no rows or
  // the region is empty.
  int worst_row = -1;
  // max over the region of (row value after substitution) - b. With no rows
  // this is std::numeric_limits<double>::lowest(); for an empty region +inf.
  double worst_margin = 0.0;
  FeasibilityMethod method = FeasibilityMethod::kLpExact;
  bool empty_region = false;
  std::vector<double> margins;  // per row
  // Maximizer of the worst row with the owner's block replaced by the
  // strategy's output, as a flat point over all levels.
  Vector witness;
};

// Per flat coordinate (lower, upper), added to the polytope as extra rows.
using VariableBounds = std::vector<std::pair<double, double>>;

// The region is the projection of the joint polytope {A x <= b} onto the
// variables the strategy does not own. Each row, with the owner's block
// replaced by the strategy, is maximized over it by simplex. Throws
// UnboundedRegionError if some row is unbounded and no bounds were supplied.
FeasibilityVerdict feasibility_check(const AffineStrategy& strategy,
                                     const LinearConstraints& constraints, const Dims& dims,
                                     double tol = 1e-9,
                                     const std::optional<VariableBounds>& bounds = {});

struct FilterItem {
  std::vector<Matrix> params;
  std::optional<FeasibilityVerdict> verdict;
  std::string error;  // set when the member could not be checked
};

// One entry per grid point, in grid order. Per-member errors are recorded,
// never thrown.
std::vector<FilterItem> filter_family(const StrategyFamily& family,
                                      const LinearConstraints& constraints, const Dims& dims,
                                      const std::vector<std::vector<Matrix>>& param_grid,
                                      double tol = 1e-9,
                                      const std::optional<VariableBounds>& bounds = {});

// Rows active (within tol) at the desired point.
std::vector<int> active_rows(const LinearConstraints& constraints, const Dims& dims,
                             const DecisionPoint& d, double tol = 1e-9);

}  // namespace revstack

#endif  // REVSTACK_CONSTRAINED_HPP_
