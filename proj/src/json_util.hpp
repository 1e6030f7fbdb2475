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

#ifndef REVSTACK_SRC_JSON_UTIL_HPP_
#define REVSTACK_SRC_JSON_UTIL_HPP_

#include <cmath>
#include <string>

#include <json.hpp>

#include "revstack/types.hpp"

namespace revstack::detail {

using Json = nlohmann::ordered_json;

// Non-finite values become strings so the output stays valid JSON.
inline Json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v == 0.0 ? 0.0 : v;
}

inline Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v[i]));
  return a;
}

inline Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number_json(m(r, c)));
    a.push_back(std::move(row));
  }
  return a;
}

}  // namespace revstack::detail

#endif  // REVSTACK_SRC_JSON_UTIL_HPP_
