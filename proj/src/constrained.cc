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

#include "revstack/constrained.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "revstack/error.hpp"
#include "revstack/simplex.hpp"

namespace revstack {

const char* to_string(FeasibilityMethod method) {
  switch (method) {
    case FeasibilityMethod::kLpExact:
      return "lp-exact";
  }
  return "unknown";
}

FeasibilityVerdict feasibility_check(const AffineStrategy& strategy,
                                     const LinearConstraints& constraints, const Dims& dims,
                                     double tol, const std::optional<VariableBounds>& bounds) {
  constraints.check_shapes(dims);
  strategy.check(dims);
  const int k = constraints.rows();
  FeasibilityVerdict v;
  if (k == 0) {
    v.worst_margin = std::numeric_limits<double>::lowest();
    return v;
  }
  const int n = dims.total();
  const int own = strategy.level;
  const Matrix joint = constraints.joint(dims);

  Matrix a = joint;
  Vector b = constraints.b;
  if (bounds) {
    if (static_cast<int>(bounds->size()) != n) {
      throw DimensionError("bounds must list " + std::to_string(n) + " coordinates");
    }
    const int k0 = static_cast<int>(a.rows());
    a.conservativeResize(k0 + 2 * n, Eigen::NoChange);
    b.conservativeResize(k0 + 2 * n);
    a.bottomRows(2 * n).setZero();
    for (int i = 0; i < n; ++i) {
      const auto [lo, hi] = (*bounds)[i];
      if (!(lo <= hi)) throw std::invalid_argument("bounds need lower <= upper");
      a(k0 + 2 * i, i) = 1.0;
      b[k0 + 2 * i] = hi;
      a(k0 + 2 * i + 1, i) = -1.0;
      b[k0 + 2 * i + 1] = -lo;
    }
  }

  const Vector c0 = strategy.offset();
  const int oo = dims.offset(own), mo = dims.size(own);
  v.margins.resize(k);
  v.worst_margin = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < k; ++r) {
    const Eigen::RowVectorXd own_row = constraints.a_blocks[own].row(r);
    Vector cost = joint.row(r).transpose();
    cost.segment(oo, mo).setZero();
    for (int j = 0; j < strategy.lower_levels(); ++j) {
      const int lvl = own + 1 + j;
      cost.segment(dims.offset(lvl), dims.size(lvl)) -=
          (own_row * strategy.coeffs[j]).transpose();
    }
    const double constant = own_row.dot(c0);
    const LpResult lp = lp_maximize(cost, a, b);
    if (lp.status == LpStatus::kInfeasible) {
      v.feasible = false;
      v.empty_region = true;
      v.worst_row = -1;
      v.worst_margin = std::numeric_limits<double>::infinity();
      v.margins.assign(k, std::numeric_limits<double>::infinity());
      v.witness = Vector();
      return v;
    }
    if (lp.status == LpStatus::kUnbounded) {
      throw UnboundedRegionError("the lower-level region is unbounded along constraint row " +
                                 std::to_string(r + 1) + "; supply explicit variable bounds");
    }
    const double margin = lp.value + constant - constraints.b[r];
    v.margins[r] = margin;
    if (margin > v.worst_margin) {
      v.worst_margin = margin;
      v.worst_row = r;
      Vector w = lp.x;
      std::vector<Vector> lower;
      for (int j = own + 1; j < dims.levels(); ++j) {
        lower.push_back(w.segment(dims.offset(j), dims.size(j)));
      }
      w.segment(oo, mo) = strategy.evaluate(lower);
      v.witness = std::move(w);
    }
  }
  v.feasible = v.worst_margin <= tol;
  return v;
}

std::vector<FilterItem> filter_family(const StrategyFamily& family,
                                      const LinearConstraints& constraints, const Dims& dims,
                                      const std::vector<std::vector<Matrix>>& param_grid,
                                      double tol, const std::optional<VariableBounds>& bounds) {
  std::vector<FilterItem> out;
  out.reserve(param_grid.size());
  for (const auto& params : param_grid) {
    FilterItem item;
    item.params = params;
    try {
      item.verdict = feasibility_check(instantiate(family, params), constraints, dims, tol, bounds);
    } catch (const std::exception& e) {
      item.error = e.what();
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<int> active_rows(const LinearConstraints& constraints, const Dims& dims,
                             const DecisionPoint& d, double tol) {
  constraints.check_shapes(dims);
  d.check(dims);
  const Vector slack = constraints.b - constraints.joint(dims) * d.flatten();
  std::vector<int> out;
  for (int r = 0; r < constraints.rows(); ++r) {
    if (std::abs(slack[r]) <= tol * (1.0 + std::abs(constraints.b[r]))) out.push_back(r);
  }
  return out;
}

}  // namespace revstack
