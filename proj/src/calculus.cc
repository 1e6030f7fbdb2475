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

#include "revstack/calculus.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "revstack/error.hpp"

namespace revstack {

namespace {

struct Jet {
  double v = 0.0;
  Vector g;
  Matrix h;  // empty when only first order is requested
};

Jet differentiate(const Expr& e, const Dims& dims, const Vector& x, bool second) {
  const Eigen::Index n = x.size();
  Jet out;
  switch (e.kind()) {
    case ExprKind::kConstant:
      out.v = e.value();
      out.g = Vector::Zero(n);
      if (second) out.h = Matrix::Zero(n, n);
      return out;
    case ExprKind::kVar: {
      const int at = dims.offset(e.level()) + e.index();
      out.v = x[at];
      out.g = Vector::Zero(n);
      out.g[at] = 1.0;
      if (second) out.h = Matrix::Zero(n, n);
      return out;
    }
    case ExprKind::kSum: {
      out = differentiate(e.children()[0], dims, x, second);
      for (size_t i = 1; i < e.children().size(); ++i) {
        Jet c = differentiate(e.children()[i], dims, x, second);
        out.v += c.v;
        out.g += c.g;
        if (second) out.h += c.h;
      }
      return out;
    }
    case ExprKind::kProduct: {
      out = differentiate(e.children()[0], dims, x, second);
      for (size_t i = 1; i < e.children().size(); ++i) {
        Jet c = differentiate(e.children()[i], dims, x, second);
        if (second) {
          Matrix outer = out.g * c.g.transpose();
          out.h = out.v * c.h + c.v * out.h + outer + outer.transpose();
        }
        out.g = out.v * c.g + c.v * out.g;
        out.v *= c.v;
      }
      return out;
    }
    case ExprKind::kPower: {
      const Jet b = differentiate(e.children()[0], dims, x, second);
      const int k = e.exponent();
      double pk2 = 1.0;  // b^(k-2), used only when k >= 2
      for (int i = 0; i < k - 2; ++i) pk2 *= b.v;
      const double pk1 = k >= 2 ? pk2 * b.v : 1.0;
      out.v = pk1 * b.v;
      out.g = (k * pk1) * b.g;
      if (second) {
        out.h = (k * pk1) * b.h;
        if (k >= 2) out.h += (static_cast<double>(k) * (k - 1) * pk2) * (b.g * b.g.transpose());
      }
      return out;
    }
    case ExprKind::kNegate: {
      out = differentiate(e.children()[0], dims, x, second);
      out.v = -out.v;
      out.g = -out.g;
      if (second) out.h = -out.h;
      return out;
    }
  }
  return out;
}

BlockGradient split(const Dims& dims, const Vector& flat) {
  BlockGradient g;
  for (int l = 0; l < dims.levels(); ++l) g.blocks.push_back(flat.segment(dims.offset(l), dims.size(l)));
  return g;
}

void check_point(const Objective& obj, const Vector& x) {
  if (x.size() != obj.dims().total()) {
    throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(obj.dims().total()));
  }
  obj.check();
}

}  // namespace

Vector gradient_flat(const Objective& obj, const Vector& x) {
  check_point(obj, x);
  if (const auto* q = obj.quadratic()) {
    return q->hessian(obj.dims()) * x + q->linear_term(obj.dims());
  }
  return differentiate(obj.expr()->root, obj.dims(), x, false).g;
}

BlockGradient gradient(const Objective& obj, const DecisionPoint& p) {
  p.check(obj.dims());
  return split(obj.dims(), gradient_flat(obj, p.flatten()));
}

BlockGradient fd_gradient(const Objective& obj, const DecisionPoint& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  p.check(obj.dims());
  obj.check();
  Vector x = p.flatten();
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double step = h * (1.0 + std::abs(xi));
    x[i] = xi + step;
    const double fp = evaluate(obj, DecisionPoint::from_flat(obj.dims(), x));
    x[i] = xi - step;
    const double fm = evaluate(obj, DecisionPoint::from_flat(obj.dims(), x));
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return split(obj.dims(), g);
}

Matrix hessian_flat(const Objective& obj, const Vector& x) {
  check_point(obj, x);
  Matrix h;
  if (const auto* q = obj.quadratic()) {
    h = q->hessian(obj.dims());
  } else {
    h = differentiate(obj.expr()->root, obj.dims(), x, true).h;
  }
  // Symmetrize so that h == h' holds elementwise.
  Matrix sym = 0.5 * (h + h.transpose());
  for (Eigen::Index r = 0; r < sym.rows(); ++r) {
    for (Eigen::Index c = r + 1; c < sym.cols(); ++c) sym(c, r) = sym(r, c);
  }
  return sym;
}

Matrix hessian(const Objective& obj, const DecisionPoint& p) {
  p.check(obj.dims());
  return hessian_flat(obj, p.flatten());
}

ConvexityVerdict strict_convexity_probe(const Objective& obj, const DecisionPoint& p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("convexity tolerance must be positive");
  Matrix h = hessian(obj, p);
  h.diagonal().array() -= tol;
  Eigen::LLT<Matrix> llt(h);
  return llt.info() == Eigen::Success ? ConvexityVerdict::kCertified
                                      : ConvexityVerdict::kNotCertified;
}

std::optional<QuadraticObjective> as_quadratic(const Objective& obj) {
  if (const auto* q = obj.quadratic()) return *q;
  const Expr& root = obj.expr()->root;
  if (root.degree() > 2) return std::nullopt;
  const Dims& dims = obj.dims();
  const Vector zero = Vector::Zero(dims.total());
  const Jet j = differentiate(root, dims, zero, true);
  return QuadraticObjective::from_assembled(dims, 0.5 * (j.h + j.h.transpose()), j.g, j.v);
}

}  // namespace revstack
