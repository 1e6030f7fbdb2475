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

#ifndef REVSTACK_EXPR_HPP_
#define REVSTACK_EXPR_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "revstack/types.hpp"

namespace revstack {

enum class ExprKind { kConstant, kVar, kSum, kProduct, kPower, kNegate };

// Immutable closed-form expression over the decision variables. Subtrees are
// shared, so copying an Expr is cheap.
//
// The factories normalize arity: sum() and product() of a single child return
// the child, and of no children return the neutral constant. Every Sum/Product
// node therefore has at least two children.
class Expr {
 public:
  static Expr constant(double value);
  // `level` and `index` are 0-based.
  static Expr var(int level, int index);
  static Expr sum(std::vector<Expr> children);
  static Expr product(std::vector<Expr> children);
  // Throws std::invalid_argument unless exponent >= 1.
  static Expr power(Expr base, int exponent);
  static Expr negate(Expr child);

  ExprKind kind() const;
  double value() const;  // kConstant
  int level() const;     // kVar
  int index() const;     // kVar
  int exponent() const;  // kPower
  // Sum/Product: all operands. Power: {base}. Negate: {child}.
  std::span<const Expr> children() const;

  // Polynomial degree (constants have degree 0).
  int degree() const;

  // Structural equality: same node kinds, values, and children in order.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Throws DimensionError if a variable references a level or index outside dims.
void check_vars(const Expr& expr, const Dims& dims);

// Evaluates at a flat point laid out according to dims.
double evaluate_expr(const Expr& expr, const Dims& dims, std::span<const double> x);

// Replaces variables: `replace(level, index)` returns the substitute or nullopt
// to keep the variable.
Expr substitute(const Expr& expr,
                const std::function<std::optional<Expr>(int, int)>& replace);

// Expression compiled to a postfix program over flat variable indices.
// Evaluation allocates nothing once the caller's stack has grown.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& expr, const Dims& dims);
  double operator()(const double* x, std::vector<double>& stack) const;

 private:
  enum class Op : unsigned char { kPushConst, kPushVar, kAdd, kMul, kPow, kNeg };
  struct Instr {
    Op op;
    int arg;  // variable index, child count, or exponent
    double value;
  };
  void emit(const Expr& e, const Dims& dims);
  std::vector<Instr> program_;
};

}  // namespace revstack

#endif  // REVSTACK_EXPR_HPP_
