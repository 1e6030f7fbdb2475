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

// Text form of objective expressions.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary ('*' unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' INT)*          right-associative, INT >= 1
//   atom   := NUMBER | VAR | '(' expr ')'
//   VAR    := 'u' LEVEL '_' INDEX | 'u' LEVEL   (1-based; short form for scalar levels)
//
// "a - b" parses to Sum(a, Negate(b)). A minus directly in front of a number
// that is not raised to a power folds into a negative constant.

#ifndef REVSTACK_FORMULA_HPP_
#define REVSTACK_FORMULA_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "revstack/expr.hpp"
#include "revstack/types.hpp"

namespace revstack {

// Throws SyntaxError or UnknownVariableError carrying the 1-based column.
// Without dims, variable ranges are not checked and "u<l>" means "u<l>_1".
Expr parse_formula(std::string_view text, const std::optional<Dims>& dims = std::nullopt);

// Inverse of parse_formula up to structure: parse_formula(print_formula(e)) == e.
std::string print_formula(const Expr& e);

// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace revstack

#endif  // REVSTACK_FORMULA_HPP_
