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

// JSON problem and strategy documents.
//
// Problem:
//   {"levels": 3, "dims": [1, 1, 1],
//    "objectives": [{"type": "quadratic", "A": {"1,1": [[1]]}, "l": [[-4], [-2], [-6]],
//                    "constant": 14},
//                   {"type": "expr", "formula": "(u1 - 1)^2 + u2^2 + u3^2"}, ...],
//    "constraints": {"A": [[[1], [-1]], [[0], [0]], [[0], [0]]], "b": [20, 20]}}
// Block keys "j,k" are 1-based with j <= k; matrices are row-major nested arrays.
//
// Strategies (offset form u^l = offset - sum_j Q_j u^j):
//   {"strategies": [{"level": 1, "offset": [12], "coeffs": {"2": [[1]], "3": [[3]]}}]}

#ifndef REVSTACK_DOCUMENT_HPP_
#define REVSTACK_DOCUMENT_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "revstack/model.hpp"
#include "revstack/synthesis.hpp"

namespace revstack {

// Throws SyntaxError (malformed JSON, with line and column; or a malformed
// value, with its JSON path), UnknownVariableError (formula variable outside
// the game, with path and formula column) or ShapeMismatchError.
GameProblem parse_problem(std::string_view text);

std::string write_problem(const GameProblem& problem);

struct StrategyEntry {
  int level = 0;  // 0-based
  Vector offset;
  std::vector<Matrix> coeffs;  // one per lower level, missing keys are zero
};

// Entries sorted by level; each level at most once.
std::vector<StrategyEntry> parse_strategies(std::string_view text, const Dims& dims);

std::string write_strategies(const std::vector<AffineStrategy>& strategies);

// Semicolon-separated JSON matrices, e.g. "[[0.1],[0.2]];[[0.3]]".
std::vector<Matrix> parse_matrix_list(std::string_view text);

}  // namespace revstack

#endif  // REVSTACK_DOCUMENT_HPP_
