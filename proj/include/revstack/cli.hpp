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

#ifndef REVSTACK_CLI_HPP_
#define REVSTACK_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace revstack {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;  // existence or precondition failure
inline constexpr int kExitFailed = 3;        // verification or feasibility failure
inline constexpr int kExitParse = 4;         // malformed input or unknown flag

// Runs the tool on `args` (without the program name). Reports go to `out`,
// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace revstack

#endif  // REVSTACK_CLI_HPP_
