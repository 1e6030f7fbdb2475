# Copyright 2026 The revstack Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Affine incentive strategies for multi-level reverse Stackelberg games."""

from revstack._core import (
    AffineStrategy,
    DimensionError,
    EquilibriumResult,
    Error,
    GameProblem,
    ParseError,
    SynthesisError,
    desired_equilibrium,
    parse_problem,
    print_formula,
    run_cli,
    synthesize,
    verify,
)

__all__ = [
    "AffineStrategy",
    "DimensionError",
    "EquilibriumResult",
    "Error",
    "GameProblem",
    "ParseError",
    "SynthesisError",
    "desired_equilibrium",
    "parse_problem",
    "print_formula",
    "run_cli",
    "synthesize",
    "verify",
]
