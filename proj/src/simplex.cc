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

#include "revstack/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "revstack/error.hpp"

namespace revstack {

namespace {

// Tableau rows hold B^-1 [A | rhs]; basis[i] is the basic column of row i.
struct Tableau {
  Matrix t;
  std::vector<int> basis;
  int cols() const { return static_cast<int>(t.cols()) - 1; }
  int rows() const { return static_cast<int>(t.rows()); }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int i = 0; i < rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[r] = c;
  }
};

enum class PhaseResult { kOptimal, kUnbounded };

// Maximizes cost'x over columns with allowed[j]; Bland's rule throughout.
PhaseResult run_phase(Tableau& tab, const Vector& cost, const std::vector<bool>& allowed,
                      double eps) {
  const int n = tab.cols();
  for (int iter = 0; iter < 100000; ++iter) {
    int enter = -1;
    for (int j = 0; j < n && enter < 0; ++j) {
      if (!allowed[j]) continue;
      double r = cost[j];
      for (int i = 0; i < tab.rows(); ++i) r -= cost[tab.basis[i]] * tab.t(i, j);
      if (r > eps) enter = j;
    }
    if (enter < 0) return PhaseResult::kOptimal;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < tab.rows(); ++i) {
      const double a = tab.t(i, enter);
      if (a <= eps) continue;
      const double ratio = tab.t(i, n) / a;
      if (leave < 0 || ratio < best - eps ||
          (std::abs(ratio - best) <= eps && tab.basis[i] < tab.basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return PhaseResult::kUnbounded;
    tab.pivot(leave, enter);
  }
  throw Error("simplex iteration limit reached");
}

}  // namespace

LpResult lp_maximize(const Vector& c, const Matrix& a, const Vector& b, double eps) {
  const int n = static_cast<int>(a.cols());
  const int k = static_cast<int>(a.rows());
  if (c.size() != n || b.size() != k) throw std::invalid_argument("LP shapes disagree");

  // Columns: p (n), q (n), slacks (k), artificials (one per negative rhs).
  std::vector<int> art_row;
  for (int i = 0; i < k; ++i) {
    if (b[i] < 0.0) art_row.push_back(i);
  }
  const int na = static_cast<int>(art_row.size());
  const int cols = 2 * n + k + na;
  Tableau tab{Matrix::Zero(k, cols + 1), std::vector<int>(k)};
  for (int i = 0; i < k; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.block(i, 0, 1, n) = sign * a.row(i);
    tab.t.block(i, n, 1, n) = -sign * a.row(i);
    tab.t(i, 2 * n + i) = sign;
    tab.t(i, cols) = sign * b[i];
    tab.basis[i] = 2 * n + i;
  }
  for (int r = 0; r < na; ++r) {
    tab.t(art_row[r], 2 * n + k + r) = 1.0;
    tab.basis[art_row[r]] = 2 * n + k + r;
  }

  const double scale = 1.0 + (k > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  if (na > 0) {
    Vector cost = Vector::Zero(cols);
    cost.tail(na).setConstant(-1.0);
    std::vector<bool> all(cols, true);
    run_phase(tab, cost, all, eps);
    double infeas = 0.0;
    for (int i = 0; i < k; ++i) {
      if (tab.basis[i] >= 2 * n + k) infeas += tab.t(i, cols);
    }
    if (infeas > 1e-9 * scale) return {LpStatus::kInfeasible, {}, 0.0};
    // Drive remaining artificials out where a real column can replace them.
    for (int i = 0; i < k; ++i) {
      if (tab.basis[i] < 2 * n + k) continue;
      for (int j = 0; j < 2 * n + k; ++j) {
        if (std::abs(tab.t(i, j)) > eps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  Vector cost = Vector::Zero(cols);
  cost.head(n) = c;
  cost.segment(n, n) = -c;
  std::vector<bool> allowed(cols, true);
  for (int j = 2 * n + k; j < cols; ++j) allowed[j] = false;
  if (run_phase(tab, cost, allowed, eps) == PhaseResult::kUnbounded) {
    return {LpStatus::kUnbounded, {}, 0.0};
  }
  Vector z = Vector::Zero(cols);
  for (int i = 0; i < k; ++i) z[tab.basis[i]] = tab.t(i, cols);
  LpResult out;
  out.status = LpStatus::kOptimal;
  out.x = z.head(n) - z.segment(n, n);
  out.value = c.dot(out.x);
  return out;
}

}  // namespace revstack
