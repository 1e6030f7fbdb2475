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

#include "revstack/expr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "revstack/error.hpp"

namespace revstack {

struct Expr::Node {
  ExprKind kind;
  double value = 0.0;
  int level = 0;
  int index = 0;
  int exponent = 0;
  std::vector<Expr> children;
};

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::kConstant, value, 0, 0, 0, {}}));
}

Expr Expr::var(int level, int index) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::kVar, 0.0, level, index, 0, {}}));
}

Expr Expr::sum(std::vector<Expr> children) {
  if (children.empty()) return constant(0.0);
  if (children.size() == 1) return std::move(children.front());
  return Expr(
      std::make_shared<const Node>(Node{ExprKind::kSum, 0.0, 0, 0, 0, std::move(children)}));
}

Expr Expr::product(std::vector<Expr> children) {
  if (children.empty()) return constant(1.0);
  if (children.size() == 1) return std::move(children.front());
  return Expr(
      std::make_shared<const Node>(Node{ExprKind::kProduct, 0.0, 0, 0, 0, std::move(children)}));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 1) throw std::invalid_argument("exponent must be a positive integer");
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::kPower, 0.0, 0, 0, exponent, std::vector<Expr>{std::move(base)}}));
}

Expr Expr::negate(Expr child) {
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::kNegate, 0.0, 0, 0, 0, std::vector<Expr>{std::move(child)}}));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::level() const { return node_->level; }
int Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::children() const { return node_->children; }

int Expr::degree() const {
  switch (kind()) {
    case ExprKind::kConstant:
      return 0;
    case ExprKind::kVar:
      return 1;
    case ExprKind::kSum: {
      int d = 0;
      for (const auto& c : children()) d = std::max(d, c.degree());
      return d;
    }
    case ExprKind::kProduct: {
      int d = 0;
      for (const auto& c : children()) d += c.degree();
      return d;
    }
    case ExprKind::kPower:
      return exponent() * children()[0].degree();
    case ExprKind::kNegate:
      return children()[0].degree();
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::kConstant:
      return a.value() == b.value() || (std::isnan(a.value()) && std::isnan(b.value()));
    case ExprKind::kVar:
      return a.level() == b.level() && a.index() == b.index();
    case ExprKind::kPower:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  const auto ca = a.children(), cb = b.children();
  return std::equal(ca.begin(), ca.end(), cb.begin(), cb.end());
}

void check_vars(const Expr& expr, const Dims& dims) {
  if (expr.kind() == ExprKind::kVar) {
    const int l = expr.level(), i = expr.index();
    if (l < 0 || l >= dims.levels()) {
      throw DimensionError("variable u" + std::to_string(l + 1) + "_" + std::to_string(i + 1) +
                           " references a level outside 1.." + std::to_string(dims.levels()));
    }
    if (i < 0 || i >= dims.size(l)) {
      throw DimensionError("variable u" + std::to_string(l + 1) + "_" + std::to_string(i + 1) +
                               " is outside level " + std::to_string(l + 1) + " of dimension " +
                               std::to_string(dims.size(l)),
                           l);
    }
    return;
  }
  for (const auto& c : expr.children()) check_vars(c, dims);
}

double evaluate_expr(const Expr& expr, const Dims& dims, std::span<const double> x) {
  switch (expr.kind()) {
    case ExprKind::kConstant:
      return expr.value();
    case ExprKind::kVar:
      return x[dims.offset(expr.level()) + expr.index()];
    case ExprKind::kSum: {
      double s = 0.0;
      for (const auto& c : expr.children()) s += evaluate_expr(c, dims, x);
      return s;
    }
    case ExprKind::kProduct: {
      double p = 1.0;
      for (const auto& c : expr.children()) p *= evaluate_expr(c, dims, x);
      return p;
    }
    case ExprKind::kPower: {
      const double b = evaluate_expr(expr.children()[0], dims, x);
      double p = 1.0;
      for (int k = 0; k < expr.exponent(); ++k) p *= b;
      return p;
    }
    case ExprKind::kNegate:
      return -evaluate_expr(expr.children()[0], dims, x);
  }
  return 0.0;
}

Expr substitute(const Expr& expr, const std::function<std::optional<Expr>(int, int)>& replace) {
  switch (expr.kind()) {
    case ExprKind::kConstant:
      return expr;
    case ExprKind::kVar: {
      auto r = replace(expr.level(), expr.index());
      return r ? *r : expr;
    }
    case ExprKind::kPower:
      return Expr::power(substitute(expr.children()[0], replace), expr.exponent());
    case ExprKind::kNegate:
      return Expr::negate(substitute(expr.children()[0], replace));
    case ExprKind::kSum:
    case ExprKind::kProduct: {
      std::vector<Expr> kids;
      kids.reserve(expr.children().size());
      for (const auto& c : expr.children()) kids.push_back(substitute(c, replace));
      return expr.kind() == ExprKind::kSum ? Expr::sum(std::move(kids))
                                           : Expr::product(std::move(kids));
    }
  }
  return expr;
}

CompiledExpr::CompiledExpr(const Expr& expr, const Dims& dims) {
  check_vars(expr, dims);
  emit(expr, dims);
}

void CompiledExpr::emit(const Expr& e, const Dims& dims) {
  switch (e.kind()) {
    case ExprKind::kConstant:
      program_.push_back({Op::kPushConst, 0, e.value()});
      return;
    case ExprKind::kVar:
      program_.push_back({Op::kPushVar, dims.offset(e.level()) + e.index(), 0.0});
      return;
    case ExprKind::kSum:
    case ExprKind::kProduct:
      for (const auto& c : e.children()) emit(c, dims);
      program_.push_back({e.kind() == ExprKind::kSum ? Op::kAdd : Op::kMul,
                          static_cast<int>(e.children().size()), 0.0});
      return;
    case ExprKind::kPower:
      emit(e.children()[0], dims);
      program_.push_back({Op::kPow, e.exponent(), 0.0});
      return;
    case ExprKind::kNegate:
      emit(e.children()[0], dims);
      program_.push_back({Op::kNeg, 0, 0.0});
      return;
  }
}

double CompiledExpr::operator()(const double* x, std::vector<double>& stack) const {
  stack.clear();
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::kPushConst:
        stack.push_back(in.value);
        break;
      case Op::kPushVar:
        stack.push_back(x[in.arg]);
        break;
      case Op::kAdd: {
        const size_t first = stack.size() - in.arg;
        double s = 0.0;
        for (size_t i = first; i < stack.size(); ++i) s += stack[i];
        stack.resize(first);
        stack.push_back(s);
        break;
      }
      case Op::kMul: {
        const size_t first = stack.size() - in.arg;
        double p = 1.0;
        for (size_t i = first; i < stack.size(); ++i) p *= stack[i];
        stack.resize(first);
        stack.push_back(p);
        break;
      }
      case Op::kPow: {
        const double b = stack.back();
        double p = 1.0;
        for (int k = 0; k < in.arg; ++k) p *= b;
        stack.back() = p;
        break;
      }
      case Op::kNeg:
        stack.back() = -stack.back();
        break;
    }
  }
  return stack.back();
}

}  // namespace revstack
