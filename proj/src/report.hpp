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

// JSON and text renderings used by the command-line tool. Every JSON object
// kind has a fixed key set; absent parts are null.

#ifndef REVSTACK_SRC_REPORT_HPP_
#define REVSTACK_SRC_REPORT_HPP_

#include <string>
#include <vector>

#include "json_util.hpp"
#include "revstack/constrained.hpp"
#include "revstack/equilibrium.hpp"
#include "revstack/synthesis.hpp"
#include "revstack/verify.hpp"

namespace revstack::detail {

// "u1 = 12 - 1*u2 - 3*u3", one line per component of the owner's block.
std::vector<std::string> strategy_lines(const AffineStrategy& s, const Dims& dims);

Json point_json(const DecisionPoint& p);
Json equilibrium_json(const EquilibriumResult& r);
Json strategy_json(const AffineStrategy& s, const Dims& dims);
Json strategies_json(const std::vector<AffineStrategy>& s, const Dims& dims);
Json verification_json(const VerificationReport& r);
Json family_json(const StrategyFamily& f);
Json feasibility_json(const FeasibilityVerdict& v);
Json params_json(const std::vector<Matrix>& params);

std::string equilibrium_text(const EquilibriumResult& r);
std::string strategies_text(const std::vector<AffineStrategy>& s, const Dims& dims);
std::string verification_text(const VerificationReport& r);
std::string family_text(const StrategyFamily& f);
std::string feasibility_text(const FeasibilityVerdict& v);

}  // namespace revstack::detail

#endif  // REVSTACK_SRC_REPORT_HPP_
