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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "report.hpp"
#include "revstack/cli.hpp"
#include "revstack/document.hpp"
#include "revstack/equilibrium.hpp"
#include "revstack/error.hpp"
#include "revstack/formula.hpp"
#include "revstack/synthesis.hpp"
#include "revstack/verify.hpp"

namespace py = pybind11;
using namespace revstack;

namespace {

DecisionPoint to_point(const std::vector<Vector>& blocks) { return DecisionPoint(blocks); }

py::object json_to_py(const detail::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Affine incentive strategies for multi-level reverse Stackelberg games.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SynthesisError>(m, "SynthesisError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());

  py::class_<GameProblem>(m, "GameProblem")
      .def_property_readonly("dims", [](const GameProblem& g) { return g.dims.sizes(); })
      .def_property_readonly("levels", [](const GameProblem& g) { return g.dims.levels(); })
      .def_property_readonly("constrained",
                             [](const GameProblem& g) { return g.constraints.has_value(); })
      .def("evaluate",
           [](const GameProblem& g, int level, const std::vector<Vector>& blocks) {
             return evaluate(g.objectives.at(static_cast<size_t>(level)), to_point(blocks));
           },
           py::arg("level"), py::arg("point"))
      .def("to_json", [](const GameProblem& g) { return write_problem(g); });

  m.def("parse_problem", [](const std::string& text) { return parse_problem(text); },
        py::arg("text"));
  m.def("print_formula",
        [](const std::string& text) { return print_formula(parse_formula(text)); },
        py::arg("text"), "Parse a formula and print it back in canonical form.");

  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_property_readonly("point", [](const EquilibriumResult& r) { return r.point.blocks; })
      .def_readonly("objective_value", &EquilibriumResult::objective_value)
      .def_property_readonly("method",
                             [](const EquilibriumResult& r) { return to_string(r.method); })
      .def_readonly("kkt_residual", &EquilibriumResult::kkt_residual)
      .def_readonly("active_set", &EquilibriumResult::active_set);

  m.def("desired_equilibrium", &desired_equilibrium, py::arg("problem"));

  py::class_<AffineStrategy>(m, "AffineStrategy")
      .def_readonly("level", &AffineStrategy::level)
      .def_readonly("anchor", &AffineStrategy::anchor)
      .def_readonly("lower_anchor", &AffineStrategy::lower_anchor)
      .def_readonly("coeffs", &AffineStrategy::coeffs)
      .def_readonly("shift", &AffineStrategy::shift)
      .def("offset", &AffineStrategy::offset)
      .def("realization_residual", &AffineStrategy::realization_residual)
      .def("__call__",
           [](const AffineStrategy& s, const std::vector<Vector>& lower) {
             return s.evaluate(lower);
           },
           py::arg("lower"));

  m.def("synthesize",
        [](const GameProblem& g, std::optional<std::vector<Vector>> desired) {
          if (desired) return synthesize_cascade(g, to_point(*desired));
          return synthesize_cascade(g);
        },
        py::arg("problem"), py::arg("desired") = py::none());

  m.def("verify",
        [](const GameProblem& g, const std::vector<AffineStrategy>& strategies, double tol) {
          const VerificationReport r = verify_full(g, strategies, tol);
          return json_to_py(detail::verification_json(r));
        },
        py::arg("problem"), py::arg("strategies"), py::arg("tol") = 1e-4,
        "Run the full verification and return the report as a dict.");

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in process; returns (code, stdout, stderr).");
}
