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

#ifndef REVSTACK_CALCULUS_HPP_
#define REVSTACK_CALCULUS_HPP_

#include <optional>

#include "revstack/model.hpp"

namespace revstack {

// Analytic block gradient: closed form for quadratics, recursive
// differentiation for expression trees.
BlockGradient gradient(const Objective& obj, const DecisionPoint& p);
Vector gradient_flat(const Objective& obj, const Vector& x);

// Central differences with per-coordinate step h * (1 + |x_i|).
BlockGradient fd_gradient(const Objective& obj, const DecisionPoint& p, double h);

// Full (sum m_l) x (sum m_l) Hessian, exactly symmetric.
Matrix hessian(const Objective& obj, const DecisionPoint& p);
Matrix hessian_flat(const Objective& obj, const Vector& x);

enum class ConvexityVerdict { kCertified, kNotCertified };

// Certified iff the Hessian at p minus tol * I admits a Cholesky factorization,
// i.e. its smallest eigenvalue exceeds tol. A sufficient condition only: the
// negative outcome never claims the sublevel set is not strictly convex.
ConvexityVerdict strict_convexity_probe(const Objective& obj, const DecisionPoint& p, double tol);

// The objective as an exact quadratic, if it is one: quadratics are returned as
// is, expressions of polynomial degree <= 2 are expanded about the origin.
std::optional<QuadraticObjective> as_quadratic(const Objective& obj);

}  // namespace revstack

#endif  // REVSTACK_CALCULUS_HPP_
