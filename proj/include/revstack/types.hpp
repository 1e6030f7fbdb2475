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

#ifndef REVSTACK_TYPES_HPP_
#define REVSTACK_TYPES_HPP_

#include <vector>

#include <Eigen/Core>

namespace revstack {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Block sizes of the joint decision space, top level first. Level indices in
// the C++ API are 0-based; documents and formulas use 1-based levels.
class Dims {
 public:
  // Throws DimensionError if there are no levels or a level has size < 1.
  // Game problems additionally require at least two levels.
  explicit Dims(std::vector<int> sizes);

  int levels() const { return static_cast<int>(sizes_.size()); }
  int size(int level) const { return sizes_.at(level); }
  int offset(int level) const { return offsets_.at(level); }
  int total() const { return total_; }
  const std::vector<int>& sizes() const { return sizes_; }

  // Dims of levels [first, levels()).
  Dims tail(int first) const;

  bool operator==(const Dims& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// A point of the joint decision space, one vector per level.
struct DecisionPoint {
  std::vector<Vector> blocks;

  DecisionPoint() = default;
  explicit DecisionPoint(std::vector<Vector> b) : blocks(std::move(b)) {}

  static DecisionPoint zeros(const Dims& dims);
  static DecisionPoint from_flat(const Dims& dims, const Vector& flat);

  // Throws DimensionError naming the first block whose length disagrees.
  void check(const Dims& dims) const;
  Vector flatten() const;
  // Blocks [first, end).
  DecisionPoint tail(int first) const;
};

// Per-level partial gradients.
struct BlockGradient {
  std::vector<Vector> blocks;

  Vector flatten() const;
  double norm() const;
  bool is_zero() const;
};

}  // namespace revstack

#endif  // REVSTACK_TYPES_HPP_
