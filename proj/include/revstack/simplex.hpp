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

// Dense two-phase tableau simplex with Bland's rule. Meant for desk-scale
// problems where termination matters more than speed.

#ifndef REVSTACK_SIMPLEX_HPP_
#define REVSTACK_SIMPLEX_HPP_

#include "revstack/types.hpp"

namespace revstack {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;  // maximizer when optimal
  double value = 0.0;
};

// maximize c'x subject to a x <= b, x free.
LpResult lp_maximize(const Vector& c, const Matrix& a, const Vector& b, double eps = 1e-10);

}  // namespace revstack

#endif  // REVSTACK_SIMPLEX_HPP_
