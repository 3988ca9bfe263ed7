// Copyright 2026 The hforge Authors
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

#include "hforge/errors.hpp"
#include "hforge/geometry.hpp"
#include "hforge/gqc.hpp"
#include "hforge/grape.hpp"
#include "hforge/hqc.hpp"
#include "hforge/protect.hpp"
#include "hforge/qcore.hpp"
#include "hforge/scenario.hpp"

namespace py = pybind11;
using namespace hforge;

PYBIND11_MODULE(_hforge, m) {
  m.doc() = "Holonomic gate construction, verification and robust optimization";
  m.attr("__version__") = version();

  static py::exception<Error> error(m, "HforgeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  // qcore
  py::class_<ToleranceConfig>(m, "ToleranceConfig")
      .def(py::init<>())
      .def_readwrite("unitarity", &ToleranceConfig::unitarity)
      .def_readwrite("hermiticity", &ToleranceConfig::hermiticity)
      .def_readwrite("cyclicity", &ToleranceConfig::cyclicity)
      .def_readwrite("holonomy", &ToleranceConfig::holonomy)
      .def_readwrite("degeneracy_spread", &ToleranceConfig::degeneracy_spread)
      .def_readwrite("degeneracy_gap", &ToleranceConfig::degeneracy_gap)
      .def_readwrite("frame", &ToleranceConfig::frame)
      .def_readwrite("leakage", &ToleranceConfig::leakage)
      .def("set", &ToleranceConfig::set, py::arg("key"), py::arg("value"))
      .def("items", &ToleranceConfig::items);

  m.def("pauli_x", &pauli_x);
  m.def("pauli_y", &pauli_y);
  m.def("pauli_z", &pauli_z);
  m.def("herm_expm", &herm_expm, py::arg("h"), py::arg("t"), "e^{-i h t} for Hermitian h");
  m.def("phase_aligned_distance", &phase_aligned_distance, py::arg("a"), py::arg("b"));
  m.def("gate_fidelity", &gate_fidelity, py::arg("u"), py::arg("v"), py::arg("p"));

  // geometry / gqc
  m.def(
      "berry_phase_spin",
      [](double theta, int samples, int band) {
        SpinFieldParams p;
        p.theta = theta;
        return berry_phase_loop(spin_field_loop(p, samples), band);
      },
      py::arg("theta"), py::arg("samples") = 10000, py::arg("band") = 1,
      "Berry phase of a spin-1/2 eigenband around a field cone of angle theta");
  m.def(
      "aa_phases",
      [](double mu_b0, double theta, double omega) {
        SpinFieldParams p;
        p.mu_b0 = mu_b0;
        p.theta = theta;
        p.omega = omega;
        const AaPrediction a = aa_closed_form(p);
        return py::make_tuple(a.theta_bar, a.gamma_plus, a.gamma_minus);
      },
      py::arg("mu_b0"), py::arg("theta"), py::arg("omega"));

  // hqc
  py::class_<LambdaGate>(m, "LambdaGate")
      .def_readonly("gate", &LambdaGate::gate)
      .def_readonly("predicted", &LambdaGate::predicted)
      .def_readonly("propagated", &LambdaGate::propagated)
      .def_property_readonly("max_K_norm", [](const LambdaGate& g) { return g.report.max_K_norm; })
      .def_property_readonly("cyclicity_residual", [](const LambdaGate& g) { return g.report.cyclicity_residual; });
  m.def(
      "lambda_resonant_gate",
      [](double theta, double phi, const std::string& shape, double duration) {
        LambdaParams p;
        p.theta = theta;
        p.phi = phi;
        p.shape = shape;
        p.duration = duration;
        return lambda_resonant_gate(p);
      },
      py::arg("theta"), py::arg("phi") = 0.0, py::arg("shape") = "square", py::arg("duration") = 1.0);

  // protect
  m.def(
      "ns_dimensions",
      [](int n) {
        std::vector<std::tuple<double, long long, long long>> out;
        for (const NsSector& s : ns_dimensions(n).sectors) out.emplace_back(s.j(), s.n, s.d);
        return out;
      },
      py::arg("n"), "(J, n_J, d_J) for collective errors on n qubits");

  // grape
  m.def(
      "nv_hadamard_fidelity",
      [](int nodes) {
        const NvSetup nv;
        const Mat h = (pauli_x() + pauli_z()) / std::sqrt(2.0);
        return averaged_fidelity(nv_resonant_controls(kPi / 4, 0.0, nv), nv_lambda_problem(h, nv), nv_noise_model(nv),
                                 nodes);
      },
      py::arg("nodes") = 5, "Noise-averaged fidelity of the unoptimized resonant NV Hadamard");

  // scenario runner
  m.def("scheme_catalog", &scheme_catalog);
  m.def(
      "validate_config",
      [](const std::string& text) {
        std::vector<std::string> out;
        for (const Diagnostic& d : validate_config(text)) out.push_back(format_diagnostic(d));
        return out;
      },
      py::arg("text"));
  m.def(
      "run_config",
      [](const std::string& text, int threads, std::optional<std::uint64_t> seed) {
        RunOptions o;
        o.threads = threads;
        o.seed = seed;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_config(text, o);
        }
        std::vector<std::string> diags;
        for (const Diagnostic& d : r.diagnostics) diags.push_back(format_diagnostic(d));
        py::dict out;
        out["exit_code"] = r.exit_code;
        out["report"] = r.report;
        out["csv"] = r.csv;
        out["diagnostics"] = diags;
        return out;
      },
      py::arg("text"), py::arg("threads") = 1, py::arg("seed") = py::none());
}
