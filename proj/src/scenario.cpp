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

#include "hforge/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "hforge/errors.hpp"
#include "hforge/geometry.hpp"
#include "hforge/gqc.hpp"
#include "hforge/grape.hpp"
#include "hforge/hqc.hpp"
#include "hforge/protect.hpp"
#include "hforge/qcore.hpp"
#include "json.hpp"

#ifndef HFORGE_VERSION
#define HFORGE_VERSION "0.0.0"
#endif

namespace hforge {

using json = nlohmann::ordered_json;

std::string version() { return HFORGE_VERSION; }

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  if (d.line > 0) os << "line " << d.line << ": ";
  if (!d.path.empty()) os << d.path << ": ";
  os << d.message;
  return os.str();
}

int resolve_threads(std::optional<int> requested) {
  if (requested) return std::max(1, *requested);
  if (const char* env = std::getenv("HFORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return int(v);
  }
  return 1;
}

namespace {

// ---------------------------------------------------------------------------
// Serialization

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json mjson(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cjson(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json rmjson(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

bool is_complex_entry(const json& e) {
  return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
}

bool is_matrix(const json& j) {
  if (!j.is_array() || j.empty()) return false;
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) return false;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) return false;
    for (const auto& e : row)
      if (!is_complex_entry(e)) return false;
  }
  return true;
}

Mat parse_matrix(const json& j) {
  Mat m(j.size(), j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      const json& e = j[r][c];
      m(r, c) = e.is_number() ? cplx(e.get<double>(), 0.0) : cplx(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

const std::map<std::string, std::function<Mat()>>& named_gates() {
  static const std::map<std::string, std::function<Mat()>> g = {
      {"hadamard", [] { return Mat((pauli_x() + pauli_z()) / std::sqrt(2.0)); }},
      {"x", [] { return pauli_x(); }},
      {"y", [] { return pauli_y(); }},
      {"z", [] { return pauli_z(); }},
      {"identity", [] { return identity(2); }},
      {"s", [] { Mat m = identity(2); m(1, 1) = kI; return m; }},
      {"t", [] { Mat m = identity(2); m(1, 1) = std::exp(kI * kPi / 4.0); return m; }},
  };
  return g;
}

Mat parse_gate(const json& j) {
  if (j.is_string()) return named_gates().at(j.get<std::string>())();
  return parse_matrix(j);
}

// ---------------------------------------------------------------------------
// Schema

struct Param {
  std::string name;
  std::string type;  // number, integer, string, boolean, matrix, gate, number_array, range, coupling_array
  bool required = false;
  json def;
  std::optional<double> min;
  bool exclusive = false;
  std::vector<std::string> choices;
  std::string doc;
};

Param req(std::string name, std::string type, std::string doc) {
  Param p;
  p.name = std::move(name);
  p.type = std::move(type);
  p.required = true;
  p.doc = std::move(doc);
  return p;
}

Param opt(std::string name, std::string type, json def, std::string doc) {
  Param p;
  p.name = std::move(name);
  p.type = std::move(type);
  p.def = std::move(def);
  p.doc = std::move(doc);
  return p;
}

Param positive(Param p) {
  p.min = 0.0;
  p.exclusive = true;
  return p;
}

Param at_least(Param p, double v) {
  p.min = v;
  return p;
}

Param choice(Param p, std::vector<std::string> c) {
  p.choices = std::move(c);
  return p;
}

struct Check {
  std::string name;
  double value;
  std::string op;  // "<=" or ">="
  double bound;
  std::string tolerance;  // tolerance context
};

struct Ctx {
  json params;
  ToleranceConfig tol;
  std::uint64_t seed = 0;
  int threads = 1;
  json results = json::object();
  std::vector<Check> checks;
  std::string csv;

  double num(const std::string& k) const { return params.at(k).get<double>(); }
  int integer(const std::string& k) const { return params.at(k).get<int>(); }
  std::string str(const std::string& k) const { return params.at(k).get<std::string>(); }
  bool flag(const std::string& k) const { return params.at(k).get<bool>(); }
  void le(const std::string& name, double v, double bound, const std::string& tol_name) {
    checks.push_back({name, v, "<=", bound, tol_name});
  }
  void ge(const std::string& name, double v, double bound, const std::string& tol_name) {
    checks.push_back({name, v, ">=", bound, tol_name});
  }
};

struct Builder {
  std::string kind;
  std::string name;
  std::string doc;
  std::vector<Param> params;
  std::function<void(Ctx&)> run;
};

const std::vector<std::string>& kinds() {
  static const std::vector<std::string> k = {"phase", "holonomy", "scheme", "grape", "sweep", "dd", "dfs"};
  return k;
}

// ---------------------------------------------------------------------------
// Shared pieces

void report_holonomy(Ctx& c, const HolonomyReport& r, const std::string& prefix = "") {
  c.results[prefix + "max_K_norm"] = r.max_K_norm;
  c.results[prefix + "cyclicity_residual"] = r.cyclicity_residual;
  c.results[prefix + "purely_geometric"] = r.purely_geometric;
  c.le(prefix + "max_K_norm", r.max_K_norm, c.tol.holonomy, "holonomy");
  c.le(prefix + "cyclicity_residual", r.cyclicity_residual, c.tol.cyclicity, "cyclicity");
}

void report_gate(Ctx& c, const Mat& gate, const Mat& predicted, const std::string& tol_name, double tol) {
  c.results["gate"] = mjson(gate);
  c.results["predicted"] = mjson(predicted);
  const double err = phase_aligned_distance(gate, predicted);
  c.results["gate_error"] = err;
  c.le("gate_error", err, tol, tol_name);
  if (c.params.contains("expected") && !c.params["expected"].is_null()) {
    const Mat e = parse_gate(c.params["expected"]);
    if (e.rows() != gate.rows()) throw ConfigError("expected gate has the wrong dimension");
    const double d = phase_aligned_distance(gate, e);
    c.results["expected_error"] = d;
    c.le("expected_error", d, tol, tol_name);
  }
}

NvSetup nv_setup(const Ctx& c) {
  NvSetup nv;
  nv.time_unit_seconds = c.num("time_unit_seconds");
  nv.thermal_sigma_hz = c.num("thermal_sigma_hz");
  nv.amplitude_half_width = c.num("amplitude_half_width");
  nv.total_time = c.num("total_time");
  nv.segments = c.integer("segments");
  nv.eta = c.num("eta");
  nv.amplitude_bound = c.num("amplitude_bound");
  return nv;
}

std::vector<Param> nv_params() {
  return {opt("gate", "gate", "hadamard", "target gate on Span{|0>, |1>} (name or 2x2 matrix)"),
          positive(opt("total_time", "number", 400.0, "total control time (time units)")),
          at_least(opt("segments", "integer", 100, "piecewise-constant segments"), 1),
          at_least(opt("eta", "number", 1e-6, "holonomic penalty weight"), 0.0),
          positive(opt("amplitude_bound", "number", 0.1, "control amplitude box")),
          positive(opt("time_unit_seconds", "number", 1e-9, "seconds per time unit")),
          at_least(opt("thermal_sigma_hz", "number", 130e3, "thermal noise standard deviation (Hz)"), 0.0),
          at_least(opt("amplitude_half_width", "number", 0.02, "uniform amplitude error half-width"), 0.0)};
}

std::vector<Param> grape_params() {
  std::vector<Param> p = nv_params();
  p.push_back(choice(opt("init", "string", "resonant", "initial controls"), {"resonant", "random"}));
  p.push_back(positive(opt("random_box", "number", 0.01, "box for random initial controls")));
  p.push_back(opt("noise", "boolean", true, "optimize the noise-averaged objective"));
  p.push_back(at_least(opt("nodes", "integer", 5, "quadrature nodes per noise axis"), 1));
  p.push_back(at_least(opt("eval_nodes", "integer", 9, "quadrature nodes for the reported average"), 1));
  p.push_back(positive(opt("step", "number", 1e-6, "initial gradient step")));
  p.push_back(positive(opt("target", "number", 0.999, "objective threshold O_p")));
  p.push_back(at_least(opt("max_iterations", "integer", 2000, "iteration cap"), 0));
  p.push_back(choice(opt("gradient", "string", "analytic", "gradient mode"), {"analytic", "finite_difference"}));
  p.push_back(opt("line_search", "boolean", true, "halve the step until the objective increases"));
  p.push_back(at_least(opt("min_fidelity", "number", 0.995, "asserted noise-averaged fidelity"), 0.0));
  return p;
}

// Axis n with gate = n.sigma up to a global phase.
Eigen::Vector3d lambda_axis(const Mat& gate) {
  const cplx det = gate.determinant();
  const cplx ph = std::sqrt(-1.0 / det);
  const Mat g = gate * ph;
  Eigen::Vector3d n((g * pauli_x()).trace().real() / 2, (g * pauli_y()).trace().real() / 2,
                    (g * pauli_z()).trace().real() / 2);
  if (std::abs(n.norm() - 1.0) > 1e-9 || phase_aligned_distance(gate, pauli_dot(n)) > 1e-9)
    throw ConfigError("resonant initial controls need a gate of the form n.sigma; use init = random");
  return n;
}

RMat initial_controls(const Ctx& c, const NvSetup& nv, const Mat& gate) {
  if (c.str("init") == "random") return random_controls(nv.segments, 4, c.num("random_box"), c.seed);
  const Eigen::Vector3d n = lambda_axis(gate);
  return nv_resonant_controls(std::acos(std::clamp(n.z(), -1.0, 1.0)), std::atan2(n.y(), n.x()), nv);
}

struct GrapeRun {
  GrapeProblem problem;
  NoiseModel noise;
  RMat initial;
  OptimizedControls result;
};

GrapeRun run_grape(Ctx& c) {
  GrapeRun g;
  const NvSetup nv = nv_setup(c);
  const Mat gate = parse_gate(c.params["gate"]);
  if (gate.rows() != 2 || gate.cols() != 2) throw ConfigError("gate must be 2x2");
  g.problem = nv_lambda_problem(gate, nv);
  g.noise = nv_noise_model(nv);
  g.initial = initial_controls(c, nv, gate);
  GrapeConfig cfg;
  cfg.step = c.num("step");
  cfg.target = c.num("target");
  cfg.max_iterations = c.integer("max_iterations");
  cfg.gradient = c.str("gradient") == "analytic" ? GradientMode::Analytic : GradientMode::FiniteDifference;
  cfg.line_search = c.flag("line_search");
  g.result = grape_optimize(g.problem, cfg, g.initial, c.flag("noise") ? &g.noise : nullptr, c.integer("nodes"),
                            c.threads);
  return g;
}

// ---------------------------------------------------------------------------
// Builders

std::vector<Builder> make_builders() {
  std::vector<Builder> b;

  // ----- phase
  b.push_back({"phase", "berry_spin", "Berry phases of a spin-1/2 in a field swept around a cone",
               {positive(opt("mu_b0", "number", 1.0, "field strength")), req("theta", "number", "cone angle"),
                at_least(opt("samples", "integer", 10000, "loop samples"), 8),
                positive(opt("tolerance", "number", 1e-4, "allowed deviation from the solid-angle law"))},
               [](Ctx& c) {
                 SpinFieldParams p;
                 p.mu_b0 = c.num("mu_b0");
                 p.theta = c.num("theta");
                 const ParameterLoop loop = spin_field_loop(p, c.integer("samples"));
                 const double gp = wrap_angle(berry_phase_loop(loop, 1, c.tol)), gm = wrap_angle(berry_phase_loop(loop, 0, c.tol));
                 const SolidAngle sa = solid_angle_prediction(p.theta);
                 c.results["gamma_plus"] = gp;
                 c.results["gamma_minus"] = gm;
                 c.results["solid_angle"] = sa.omega;
                 c.results["predicted_plus"] = sa.gamma_plus;
                 c.results["predicted_minus"] = sa.gamma_minus;
                 c.results["error_plus"] = angle_distance(gp, sa.gamma_plus);
                 c.results["error_minus"] = angle_distance(gm, sa.gamma_minus);
                 c.le("error_plus", angle_distance(gp, sa.gamma_plus), c.num("tolerance"), "parameters.tolerance");
                 c.le("error_minus", angle_distance(gm, sa.gamma_minus), c.num("tolerance"), "parameters.tolerance");
               }});
  b.push_back({"phase", "aa_phase", "Aharonov-Anandan phases in the rotating field against exact evolution",
               {positive(opt("mu_b0", "number", 1.0, "field strength")), req("theta", "number", "field angle"),
                req("omega", "number", "rotation frequency (non-zero)"), opt("phi0", "number", 0.0, "initial azimuth"),
                at_least(opt("steps", "integer", 512, "record samples"), 8)},
               [](Ctx& c) {
                 SpinFieldParams p;
                 p.mu_b0 = c.num("mu_b0");
                 p.theta = c.num("theta");
                 p.omega = c.num("omega");
                 p.phi0 = c.num("phi0");
                 if (p.omega == 0.0) throw ConfigError("omega must be non-zero");
                 const AaPrediction a = aa_closed_form(p);
                 const EvolutionRecord rec = aa_exact_record(p, c.integer("steps"));
                 const PhaseDecomposition dp = decompose_phase(rec, a.eta_plus, true, c.tol.cyclicity);
                 const PhaseDecomposition dm = decompose_phase(rec, a.eta_minus, true, c.tol.cyclicity);
                 c.results["theta_bar"] = a.theta_bar;
                 c.results["gamma_plus"] = a.gamma_plus;
                 c.results["gamma_minus"] = a.gamma_minus;
                 c.results["exact_plus"] = dp.geometric;
                 c.results["exact_minus"] = dm.geometric;
                 const double e = std::max(angle_distance(dp.geometric, a.gamma_plus),
                                           angle_distance(dm.geometric, a.gamma_minus));
                 c.results["error"] = e;
                 c.le("error", e, c.tol.holonomy, "holonomy");
               }});
  b.push_back({"phase", "adiabatic_gate", "Adiabatic geometric phase gate from one loop of the field",
               {positive(opt("mu_b0", "number", 1.0, "field strength")), req("theta", "number", "cone angle"),
                positive(req("period", "number", "loop duration T")),
                positive(opt("adiabatic_bound", "number", 0.05, "warning threshold for omega / (mu B0)"))},
               [](Ctx& c) {
                 SpinFieldParams p;
                 p.mu_b0 = c.num("mu_b0");
                 p.theta = c.num("theta");
                 const AdiabaticGate g = adiabatic_phase_gate(p, c.num("period"), c.num("adiabatic_bound"));
                 c.results["gate"] = mjson(g.gate);
                 c.results["gamma_plus"] = g.gamma_plus;
                 c.results["gamma_minus"] = g.gamma_minus;
                 c.results["dynamical_plus"] = g.dynamical_plus;
                 c.results["dynamical_minus"] = g.dynamical_minus;
                 c.results["adiabaticity"] = g.adiabaticity;
                 c.results["adiabaticity_warning"] = g.adiabaticity_warning;
                 c.results["warning"] = g.warning;
               }});
  b.push_back({"phase", "dynamical_free", "Phase of the cyclic state at the dynamical-phase-free drive frequency",
               {positive(opt("omega0", "number", 1.0, "Larmor frequency")), req("omega1", "number", "drive amplitude"),
                at_least(opt("steps", "integer", 512, "record samples"), 8)},
               [](Ctx& c) {
                 const EvolutionRecord rec = dynamical_free_record(c.num("omega0"), c.num("omega1"), c.integer("steps"));
                 const PhaseDecomposition d = decompose_phase(rec, rec.initial_states.at(0), true, c.tol.cyclicity);
                 c.results["omega"] = dynamical_free_frequency(c.num("omega0"), c.num("omega1"));
                 c.results["total"] = d.total;
                 c.results["dynamical"] = d.dynamical;
                 c.results["geometric"] = d.geometric;
                 c.le("abs_dynamical", std::abs(d.dynamical), c.tol.holonomy, "holonomy");
               }});
  b.push_back({"phase", "oscillator", "Unconventional geometric phase of a driven oscillator vs a Fock oracle",
               {req("beta", "number", "drive strength"), positive(req("omega", "number", "detuning")),
                positive(req("time", "number", "evolution time")),
                at_least(opt("n_cut", "integer", 40, "Fock truncation"), 4),
                at_least(opt("steps", "integer", 4000, "time steps"), 16),
                positive(opt("tolerance", "number", 1e-4, "allowed phase deviation"))},
               [](Ctx& c) {
                 const double beta = c.num("beta"), w = c.num("omega"), t = c.num("time");
                 const OscillatorPhases e = unconventional_oscillator_phases(beta, w, t);
                 const FockPhases f = oscillator_fock_phases(beta, w, t, c.integer("n_cut"), c.integer("steps"));
                 c.results["total"] = e.total;
                 c.results["dynamical"] = e.dynamical;
                 c.results["geometric"] = e.geometric;
                 c.results["fock_dynamical"] = f.dynamical.back();
                 c.results["fock_geometric"] = f.geometric.back();
                 c.results["truncation_leakage"] = f.truncation_leakage;
                 const double err = std::max(std::abs(f.dynamical.back() - e.dynamical),
                                             std::abs(f.geometric.back() - e.geometric));
                 c.results["error"] = err;
                 c.le("error", err, c.num("tolerance"), "parameters.tolerance");
                 c.le("truncation_leakage", f.truncation_leakage, c.tol.leakage, "leakage");
               }});
  b.push_back({"phase", "ion_gate", "Unconventional geometric two-ion phase gate",
               {positive(req("omega_d", "number", "driving strength")), positive(req("delta", "number", "detuning")),
                opt("phi", "number", 0.0, "drive phase"),
                at_least(opt("loop_samples", "integer", 4096, "phase-space polygon samples"), 16)},
               [](Ctx& c) {
                 const IonGate g = ion_unconventional_gate(c.num("omega_d"), c.num("delta"), c.num("phi"),
                                                           c.integer("loop_samples"));
                 c.results["gamma"] = g.gamma;
                 c.results["geometric"] = g.geometric;
                 c.results["dynamical"] = g.dynamical;
                 c.results["loop_integral"] = g.loop_integral;
                 c.results["enclosed_area"] = g.enclosed_area;
                 c.results["gate"] = mjson(g.gate);
                 c.results["cz_residual"] = g.cz_residual;
                 c.le("dynamical_plus_two_geometric", std::abs(g.dynamical + 2.0 * g.geometric), 1e-12, "exact");
               }});

  // ----- holonomy
  b.push_back({"holonomy", "tripod", "Adiabatic tripod holonomies and the conditional phase",
               {choice(opt("loop", "string", "octant", "loop on the sphere"), {"octant", "cap"}),
                positive(opt("theta0", "number", kPi / 2, "cap opening angle")),
                at_least(opt("samples", "integer", 8000, "loop samples"), 16),
                positive(opt("tolerance", "number", 1e-5, "allowed phase deviation"))},
               [](Ctx& c) {
                 const TripodLoop loop = c.str("loop") == "octant" ? octant_loop(c.integer("samples"))
                                                                   : cap_loop(c.num("theta0"), c.integer("samples"));
                 const TripodGates g = tripod_gates(loop, c.tol);
                 c.results["solid_angle"] = g.solid_angle;
                 c.results["u_z"] = mjson(g.u_z);
                 c.results["phi1"] = g.phi1;
                 c.results["u_y"] = mjson(g.u_y);
                 c.results["phi2"] = g.phi2;
                 c.results["phi3"] = g.phi3;
                 c.results["conditional"] = mjson(g.conditional);
                 c.le("phi1_error", angle_distance(g.phi1, -0.5 * g.solid_angle), c.num("tolerance"),
                      "parameters.tolerance");
               }});
  b.push_back({"holonomy", "two_loop", "Two-loop geometric phase gate with cancelled dynamical phase",
               {req("gamma_over_pi", "number", "target geometric phase / pi"),
                positive(opt("omega0", "number", 1.0, "loop-1 detuning term")),
                positive(opt("omega1", "number", 0.6, "loop-1 drive")), positive(opt("omega", "number", 0.4, "rotation")),
                opt("guess_omega0p", "number", 1.0, "Newton guess"), opt("guess_omega1p", "number", 1.0, "Newton guess"),
                at_least(opt("steps", "integer", 1024, "record samples"), 16)},
               [](Ctx& c) {
                 TwoLoopParams g;
                 g.omega0 = c.num("omega0");
                 g.omega1 = c.num("omega1");
                 g.omega = c.num("omega");
                 g.omega0p = c.num("guess_omega0p");
                 g.omega1p = c.num("guess_omega1p");
                 const TwoLoopResult r = two_loop_schedule(c.num("gamma_over_pi"), g, c.integer("steps"));
                 c.results["omega0p"] = r.params.omega0p;
                 c.results["omega1p"] = r.params.omega1p;
                 c.results["iterations"] = r.iterations;
                 c.results["constraint_residual"] = r.constraint_residual;
                 c.results["dynamical_sum"] = r.dynamical_sum;
                 c.results["geometric_sum"] = r.geometric_sum;
                 c.results["gate"] = mjson(r.gate);
                 c.le("abs_dynamical_sum", std::abs(wrap_angle(r.dynamical_sum)), c.tol.holonomy, "holonomy");
               }});

  // ----- scheme
  b.push_back({"scheme", "lambda_resonant", "Resonant Lambda-system holonomic gate n.sigma",
               {req("theta", "number", "polar angle of n"), opt("phi", "number", 0.0, "azimuth of n"),
                choice(opt("shape", "string", "square", "envelope"), {"square", "sin2"}),
                positive(opt("duration", "number", 1.0, "pulse duration")),
                opt("expected", "gate", nullptr, "optional gate the result must match")},
               [](Ctx& c) {
                 LambdaParams p;
                 p.theta = c.num("theta");
                 p.phi = c.num("phi");
                 p.shape = c.str("shape");
                 p.duration = c.num("duration");
                 const LambdaGate g = lambda_resonant_gate(p, c.tol);
                 report_gate(c, g.gate, g.predicted, "holonomy", c.tol.holonomy);
                 report_holonomy(c, g.report);
               }});
  b.push_back({"scheme", "sm_two_qubit", "Two-ion Lambda entangling gate",
               {req("theta", "number", "mixing angle"), opt("phi", "number", 0.0, "phase"),
                opt("expected", "gate", nullptr, "optional 4x4 gate")},
               [](Ctx& c) {
                 const TwoQubitLambda g = sm_two_qubit_gate(c.num("theta"), c.num("phi"), kPi, c.tol);
                 report_gate(c, g.gate, g.predicted, "holonomy", c.tol.holonomy);
                 c.results["commutator"] = g.commutator;
                 report_holonomy(c, g.report);
               }});
  b.push_back({"scheme", "single_shot", "Off-resonant single-shot holonomic gate",
               {req("alpha", "number", "bright-state angle"), opt("beta", "number", 0.0, "bright-state phase"),
                req("gamma", "number", "detuning angle"), positive(opt("omega", "number", 1.0, "Rabi frequency")),
                choice(opt("shape", "string", "square", "envelope"), {"square", "sin2"}),
                opt("strict", "boolean", true, "reject non-square envelopes"),
                opt("expected", "gate", nullptr, "optional gate")},
               [](Ctx& c) {
                 const SingleShotGate g = single_shot_gate(c.num("alpha"), c.num("beta"), c.num("gamma"), c.num("omega"),
                                                           c.str("shape"), c.flag("strict"), c.tol);
                 c.results["rotation_angle"] = g.rotation_angle;
                 report_gate(c, g.gate, g.predicted, "holonomy", c.tol.holonomy);
                 report_holonomy(c, g.report);
               }});
  b.push_back({"scheme", "multi_pulse", "Single-loop multi-pulse holonomic gate",
               {req("theta", "number", "bright-state angle"), opt("phi", "number", 0.0, "bright-state phase"),
                req("etas", "number_array", "relative phase of each pulse pair"),
                opt("areas", "number_array", nullptr, "pulse areas (default pi/2 each)")},
               [](Ctx& c) {
                 std::vector<MultiPulseSegment> segs;
                 const auto etas = c.params["etas"].get<std::vector<double>>();
                 std::vector<double> areas(etas.size(), kPi / 2);
                 if (!c.params["areas"].is_null()) areas = c.params["areas"].get<std::vector<double>>();
                 if (areas.size() != etas.size()) throw ConfigError("areas and etas must have the same length");
                 for (std::size_t k = 0; k < etas.size(); ++k) {
                   MultiPulseSegment s;
                   s.eta = etas[k];
                   s.area = areas[k];
                   segs.push_back(s);
                 }
                 const MultiPulseGate g = multi_pulse_gate(c.num("theta"), c.num("phi"), segs, c.tol);
                 c.results["gate"] = mjson(g.gate);
                 report_holonomy(c, g.report);
               }});
  b.push_back({"scheme", "four_level", "Four-level two-qubit scheme H = [[0, S], [S^dag, 0]]",
               {req("s", "matrix", "2x2 coupling block"),
                choice(opt("mode", "string", "block", "target structure"), {"block", "swap"}),
                at_least(opt("area", "number", 0.0, "pulse area (0 = smallest admissible)"), 0.0)},
               [](Ctx& c) {
                 const Mat s = parse_matrix(c.params["s"]);
                 const FourLevelGate g = four_level_gate(
                     s, c.str("mode") == "block" ? FourLevelMode::BlockDiagonal : FourLevelMode::Swap, c.num("area"));
                 c.results["alpha"] = g.alpha;
                 c.results["beta"] = g.beta;
                 c.results["area"] = g.area;
                 c.results["propagated"] = mjson(g.propagated);
                 c.results["u0"] = mjson(g.u0);
                 c.results["u1"] = mjson(g.u1);
                 c.results["off_block_norm"] = g.off_block_norm;
                 c.results["diag_block_norm"] = g.diag_block_norm;
                 const double err = (g.propagated - g.predicted).norm();
                 c.results["prediction_error"] = err;
                 c.le("prediction_error", err, c.tol.holonomy, "holonomy");
                 c.le(c.str("mode") == "block" ? "off_block_norm" : "diag_block_norm",
                      c.str("mode") == "block" ? g.off_block_norm : g.diag_block_norm, c.tol.holonomy, "holonomy");
               }});
  b.push_back({"scheme", "xy_aux_single", "Single-qubit gate through an XY-coupled auxiliary qubit",
               {req("theta", "number", "gate angle"), opt("beta", "number", 0.0, "gate phase"),
                at_least(opt("max_multiple", "integer", 2000000, "largest odd multiple searched"), 1),
                opt("expected", "gate", nullptr, "optional gate")},
               [](Ctx& c) {
                 const XyAuxGate g = xy_aux_single_gate(c.num("theta"), c.num("beta"), c.tol, c.integer("max_multiple"));
                 c.results["area"] = g.area;
                 c.results["odd_multiple"] = g.odd_multiple;
                 c.results["even_multiple"] = g.even_multiple;
                 c.results["exact"] = g.exact;
                 c.results["phase_error"] = g.phase_error;
                 c.results["leakage"] = g.leakage;
                 report_gate(c, g.gate, g.predicted, "holonomy", std::max(c.tol.holonomy, std::sqrt(c.tol.leakage)));
                 c.le("leakage", g.leakage, c.tol.leakage, "leakage");
               }});
  b.push_back({"scheme", "xy_aux_two_qubit", "Two-qubit gate through a shared XY-coupled auxiliary",
               {req("theta", "number", "mixing angle"), positive(opt("omega", "number", 1.0, "coupling scale")),
                opt("expected", "gate", nullptr, "optional 4x4 gate")},
               [](Ctx& c) {
                 const XyAuxTwoQubit g = xy_aux_two_qubit_gate(c.num("theta"), c.num("omega"), c.tol);
                 c.results["j13"] = g.j13;
                 c.results["j23"] = g.j23;
                 c.results["tau"] = g.tau;
                 c.results["v2_block"] = mjson(g.v2_block);
                 c.results["leakage"] = g.leakage;
                 report_gate(c, g.gate, g.predicted, "holonomy", c.tol.holonomy);
                 c.le("leakage", g.leakage, c.tol.leakage, "leakage");
               }});
  b.push_back({"scheme", "orange_slice", "Three-window resonant geometric gate e^{i gamma n.sigma}",
               {req("gamma", "number", "geometric phase"), req("theta", "number", "polar angle of n"),
                opt("phi", "number", 0.0, "azimuth of n"),
                choice(opt("shape", "string", "square", "window envelope"), {"square", "sin2"}),
                positive(opt("window", "number", 1.0, "window duration")),
                at_least(opt("substeps", "integer", 2000, "propagation substeps per window"), 1)},
               [](Ctx& c) {
                 const OrangeSlice o = orange_slice_gate(c.num("gamma"), c.num("theta"), c.num("phi"), c.str("shape"),
                                                         c.num("window"));
                 const Mat u = propagate(o.schedule, c.integer("substeps")).final_propagator();
                 report_gate(c, u, o.gate, "holonomy", c.tol.holonomy);
               }});
  b.push_back({"scheme", "s_sequence", "NMR preparation sequence for the conditional adiabatic gate",
               {positive(opt("omega0", "number", 1.0, "Larmor frequency")), req("omega1", "number", "drive amplitude"),
                req("omega", "number", "drive frequency"), req("J", "number", "coupling")},
               [](Ctx& c) {
                 NmrParams p;
                 p.omega0 = c.num("omega0");
                 p.omega1 = c.num("omega1");
                 p.omega = c.num("omega");
                 p.J = c.num("J");
                 const SSequence s = s_sequence(p);
                 c.results["delta_plus"] = s.delta_plus;
                 c.results["delta_minus"] = s.delta_minus;
                 c.results["phi_prime"] = s.phi_prime;
                 c.results["t_c"] = s.t_c;
                 c.results["theta0"] = s.theta0;
                 c.results["theta1"] = s.theta1;
                 c.results["conditional"] = mjson(s.conditional);
               }});
  b.push_back({"scheme", "conditional_phase", "Generalized-echo conditional adiabatic phase gate",
               {positive(opt("omega0", "number", 1.0, "Larmor frequency")), req("omega1", "number", "drive amplitude"),
                req("omega", "number", "drive frequency"), opt("phi", "number", 0.0, "drive phase"),
                req("J", "number", "coupling")},
               [](Ctx& c) {
                 NmrParams p;
                 p.omega0 = c.num("omega0");
                 p.omega1 = c.num("omega1");
                 p.omega = c.num("omega");
                 p.phi = c.num("phi");
                 p.J = c.num("J");
                 const ConditionalGate g = conditional_adiabatic_gate(p);
                 c.results["delta_gamma"] = g.delta_gamma;
                 c.results["gate"] = mjson(g.gate);
                 c.results["local"] = is_local_two_qubit(g.gate);
               }});
  b.push_back({"scheme", "spin_echo", "Spin-echo composite that cancels the dynamical phase",
               {positive(opt("mu_b0", "number", 1.0, "field strength")), req("theta", "number", "cone angle"),
                positive(req("period", "number", "loop duration")),
                choice(opt("mode", "string", "adiabatic", "traversal model"), {"adiabatic", "propagate"}),
                at_least(opt("samples", "integer", 4000, "loop samples"), 16)},
               [](Ctx& c) {
                 SpinFieldParams p;
                 p.mu_b0 = c.num("mu_b0");
                 p.theta = c.num("theta");
                 const double period = c.num("period");
                 p.omega = 2.0 * kPi / period;
                 const ControlSchedule loop = spin_field_schedule(p, period);
                 const Eigen::Vector3d perp(std::cos(p.theta), 0.0, -std::sin(p.theta));
                 const Mat pi = -kI * pauli_dot(perp);
                 const EchoResult e = spin_echo_gate(loop, pi, c.str("mode") == "adiabatic" ? EchoMode::Adiabatic
                                                                                              : EchoMode::Propagate,
                                                     Mat(), c.integer("samples"));
                 c.results["gamma_plus"] = e.gamma_plus;
                 c.results["gamma_minus"] = e.gamma_minus;
                 c.results["gate"] = mjson(e.gate);
                 const cplx rel = e.gate(0, 0) * std::conj(e.gate(1, 1));
                 c.results["relative_phase"] = std::arg(rel);
               }});

  // ----- grape
  b.push_back({"grape", "nv_lambda", "GRAPE search for a robust holonomic Lambda gate (NV mapping)", grape_params(),
               [](Ctx& c) {
                 const GrapeRun g = run_grape(c);
                 const int eval = c.integer("eval_nodes");
                 const double before = averaged_fidelity(g.initial, g.problem, g.noise, eval, c.threads);
                 const double after = averaged_fidelity(g.result.controls, g.problem, g.noise, eval, c.threads);
                 c.results["converged"] = g.result.converged;
                 c.results["message"] = g.result.message;
                 c.results["iterations"] = g.result.iterations;
                 c.results["objective"] = g.result.objective;
                 c.results["fidelity"] = g.result.terms.fidelity;
                 c.results["penalty"] = g.result.terms.penalty;
                 c.results["initial_average_fidelity"] = before;
                 c.results["average_fidelity"] = after;
                 c.results["max_K_norm"] = g.result.holonomy.max_K_norm;
                 c.results["trace"] = g.result.trace;
                 c.results["controls"] = rmjson(g.result.controls);
                 c.ge("average_fidelity", after, c.num("min_fidelity"), "parameters.min_fidelity");
               }});

  // ----- sweep
  {
    std::vector<Param> p = grape_params();
    p.push_back(choice(opt("controls", "string", "resonant", "controls to sweep"), {"resonant", "grape"}));
    p.push_back(req("delta1", "range", "amplitude-error grid {min, max, count}"));
    p.push_back(req("delta2", "range", "thermal-detuning grid in rad per time unit {min, max, count}"));
    p.push_back(choice(opt("measure", "string", "trace", "fidelity measure"), {"trace", "average"}));
    b.push_back({"sweep", "nv_lambda", "Robustness map of a Lambda gate over (delta1, delta2)", p, [](Ctx& c) {
                   const NvSetup nv = nv_setup(c);
                   const Mat gate = parse_gate(c.params["gate"]);
                   GrapeProblem prob = nv_lambda_problem(gate, nv);
                   RMat ctrl;
                   if (c.str("controls") == "grape") {
                     const GrapeRun g = run_grape(c);
                     ctrl = g.result.controls;
                     c.results["grape_converged"] = g.result.converged;
                     c.results["grape_iterations"] = g.result.iterations;
                   } else {
                     ctrl = initial_controls(c, nv, gate);
                   }
                   auto grid = [](const json& r) {
                     const int n = r["count"].get<int>();
                     const double lo = r["min"].get<double>(), hi = r["max"].get<double>();
                     std::vector<double> v(n);
                     for (int k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
                     return v;
                   };
                   const auto d1 = grid(c.params["delta1"]), d2 = grid(c.params["delta2"]);
                   const RobustnessMap m =
                       robustness_sweep(ctrl, prob, nv_noise_model(nv).error_ops[0], d1, d2,
                                        c.str("measure") == "trace" ? FidelityMeasure::Trace : FidelityMeasure::Average,
                                        c.threads);
                   std::string csv = "delta1,delta2,fidelity\n";
                   char buf[128];
                   for (std::size_t i = 0; i < d1.size(); ++i)
                     for (std::size_t j = 0; j < d2.size(); ++j) {
                       std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", d1[i], d2[j], m.fidelity(i, j));
                       csv += buf;
                     }
                   c.csv = csv;
                   c.results["cells"] = int(d1.size() * d2.size());
                   c.results["min_fidelity"] = m.fidelity.minCoeff();
                   c.results["max_fidelity"] = m.fidelity.maxCoeff();
                   c.results["mean_fidelity"] = m.fidelity.mean();
                 }});
  }

  // ----- dd
  b.push_back({"dd", "decoupling", "Dynamical decoupling cycle with an explicit environment register",
               {choice(opt("sequence", "string", "X", "decoupling procedure"), {"X", "XY"}),
                positive(req("tau", "number", "free-evolution interval")),
                at_least(opt("cycles", "integer", 1, "repetitions"), 1),
                at_least(opt("system_qubits", "integer", 1, "system qubits"), 1),
                req("h_env", "matrix", "environment Hamiltonian"),
                req("couplings", "coupling_array", "[{qubit, axis, env_op}] linear system-environment terms"),
                at_least(opt("pulse_width", "number", 0.0, "finite pulse width (0 = ideal)"), 0.0)},
               [](Ctx& c) {
                 DdModel m;
                 m.system_qubits = c.integer("system_qubits");
                 m.h_env = parse_matrix(c.params["h_env"]);
                 for (const auto& t : c.params["couplings"]) {
                   LinearCoupling lc;
                   lc.qubit = t["qubit"].get<int>();
                   lc.axis = t["axis"].get<std::string>()[0];
                   lc.env_op = parse_matrix(t["env_op"]);
                   m.couplings.push_back(lc);
                 }
                 const DdResult r = dd_sequence(c.str("sequence") == "X" ? DdKind::X : DdKind::XY, c.num("tau"),
                                                c.integer("cycles"), m, c.num("pulse_width"));
                 c.results["total_time"] = r.total_time;
                 c.results["residual"] = r.residual;
                 c.results["second_order"] = r.second_order;
                 c.results["unitarity_residual"] = unitarity_residual(r.evolution);
                 c.le("unitarity_residual", unitarity_residual(r.evolution), c.tol.unitarity, "unitarity");
               }});

  // ----- dfs
  b.push_back({"dfs", "dfs3_lambda", "Logical Lambda gate in DFS3 under collective dephasing",
               {req("theta", "number", "polar angle of n"), opt("phi", "number", 0.0, "azimuth of n"),
                opt("dephasing", "number", 0.3, "collective coupling strength lambda"),
                opt("environment_field", "number", 0.2, "environment qubit splitting")},
               [](Ctx& c) {
                 const DfsCode code = make_dfs_code("DFS3");
                 const double th = c.num("theta"), ph = c.num("phi");
                 const cplx w0 = std::sin(th / 2) * std::exp(kI * ph), w1 = -std::cos(th / 2);
                 const ControlSchedule s = dfs_logical_lambda(code, w0, w1, kPi);
                 const Mat sz = collective_error_ops(3, "z")[0];
                 const Mat noise = c.num("dephasing") * kron(sz, pauli_x()) +
                                   c.num("environment_field") * kron(identity(8), pauli_z());
                 const Mat u = herm_expm(kron(s.hamiltonian(0, 0.0), identity(2)) + noise, kPi);
                 const Eigen::Vector3d n(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
                 const double f = logical_process_fidelity(u, code.isometry(), pauli_dot(n), 2, 0);
                 const Mat bare = herm_expm(c.num("dephasing") * kron(0.5 * pauli_z(), pauli_x()) +
                                                c.num("environment_field") * kron(identity(2), pauli_z()),
                                            kPi);
                 const double fb = logical_process_fidelity(bare, identity(2), identity(2), 2, 0);
                 c.results["logical_fidelity"] = f;
                 c.results["unencoded_fidelity"] = fb;
                 c.ge("logical_fidelity", f, 1.0 - c.tol.holonomy, "holonomy");
               }});
  b.push_back({"dfs", "ns_dimensions", "Noiseless-subsystem decomposition under collective errors",
               {at_least(req("n", "integer", "number of qubits"), 1)}, [](Ctx& c) {
                 const NsDecomposition d = ns_dimensions(c.integer("n"));
                 json sectors = json::array();
                 long long total = 0;
                 for (const NsSector& s : d.sectors) {
                   sectors.push_back({{"J", s.j()}, {"n", s.n}, {"d", s.d}});
                   total += s.n * s.d;
                 }
                 c.results["sectors"] = sectors;
                 c.results["dimension"] = total;
                 c.ge("completeness", double(total), std::ldexp(1.0, d.n_qubits), "exact");
               }});
  return b;
}

const std::vector<Builder>& builders() {
  static const std::vector<Builder> b = make_builders();
  return b;
}

// ---------------------------------------------------------------------------
// Validation

int line_of(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const std::string& key : path) {
    const std::size_t p = text.find("\"" + key + "\"", pos);
    if (p == std::string::npos) break;
    pos = p;
  }
  if (pos == 0) return 0;
  return 1 + int(std::count(text.begin(), text.begin() + long(pos), '\n'));
}

struct Validator {
  const std::string& text;
  std::vector<Diagnostic> out;

  void add(const std::vector<std::string>& path, const std::string& msg) {
    std::string dotted;
    for (const auto& p : path) dotted += (dotted.empty() ? "" : ".") + p;
    out.push_back({dotted, line_of(text, path), msg});
  }
};

std::string type_name(const json& j) { return j.type_name(); }

void check_param(Validator& v, const Param& p, const json& val) {
  const std::vector<std::string> path = {"parameters", p.name};
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) v.add(path, "expected " + what + ", got " + type_name(val));
    return ok;
  };
  if (p.type == "number") {
    if (!need(val.is_number(), "a number")) return;
  } else if (p.type == "integer") {
    if (!need(val.is_number_integer(), "an integer")) return;
  } else if (p.type == "string") {
    if (!need(val.is_string(), "a string")) return;
  } else if (p.type == "boolean") {
    need(val.is_boolean(), "a boolean");
    return;
  } else if (p.type == "matrix") {
    need(is_matrix(val), "a matrix (rows of numbers or [re, im] pairs)");
    return;
  } else if (p.type == "gate") {
    if (val.is_null()) return;
    if (val.is_string()) {
      if (!named_gates().count(val.get<std::string>())) v.add(path, "unknown gate name '" + val.get<std::string>() + "'");
      return;
    }
    need(is_matrix(val), "a gate name or matrix");
    return;
  } else if (p.type == "number_array") {
    if (val.is_null() && !p.required) return;
    bool ok = val.is_array() && !val.empty();
    if (ok)
      for (const auto& e : val) ok = ok && e.is_number();
    need(ok, "a non-empty array of numbers");
    return;
  } else if (p.type == "range") {
    bool ok = val.is_object() && val.contains("min") && val.contains("max") && val.contains("count") &&
              val["min"].is_number() && val["max"].is_number() && val["count"].is_number_integer();
    if (!need(ok, "an object {min, max, count}")) return;
    if (val["count"].get<long long>() < 1) v.add(path, "count must be >= 1");
    return;
  } else if (p.type == "coupling_array") {
    if (!need(val.is_array(), "an array of couplings")) return;
    for (std::size_t k = 0; k < val.size(); ++k) {
      const json& t = val[k];
      const bool ok = t.is_object() && t.contains("qubit") && t["qubit"].is_number_integer() && t.contains("axis") &&
                      t["axis"].is_string() && t.contains("env_op") && is_matrix(t["env_op"]);
      if (!ok) {
        v.add(path, "coupling " + std::to_string(k) + " needs {qubit: int, axis: x|y|z, env_op: matrix}");
      } else {
        const std::string a = t["axis"].get<std::string>();
        if (a != "x" && a != "y" && a != "z") v.add(path, "coupling " + std::to_string(k) + " has axis '" + a + "'");
      }
    }
    return;
  }
  if (p.min && val.is_number()) {
    const double x = val.get<double>();
    if (p.exclusive ? !(x > *p.min) : !(x >= *p.min)) {
      std::ostringstream os;
      os << "must be " << (p.exclusive ? "> " : ">= ") << *p.min << ", got " << x;
      v.add(path, os.str());
    }
  }
  if (!p.choices.empty() && val.is_string()) {
    const std::string s = val.get<std::string>();
    if (std::find(p.choices.begin(), p.choices.end(), s) == p.choices.end()) {
      std::string all;
      for (const auto& ch : p.choices) all += (all.empty() ? "" : ", ") + ch;
      v.add(path, "'" + s + "' is not one of: " + all);
    }
  }
}

const Builder* find_builder(const std::string& kind, const std::string& name) {
  for (const Builder& b : builders())
    if (b.kind == kind && b.name == name) return &b;
  return nullptr;
}

std::vector<const Builder*> builders_of(const std::string& kind) {
  std::vector<const Builder*> out;
  for (const Builder& b : builders())
    if (b.kind == kind) out.push_back(&b);
  return out;
}

// Parses and validates; returns the builder when the config is usable.
const Builder* validate(const std::string& text, json& cfg, std::vector<Diagnostic>& diags) {
  Validator v{text, {}};
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + int(std::count(text.begin(), text.begin() + long(byte), '\n'));
    diags.push_back({"", line, std::string("invalid JSON: ") + e.what()});
    return nullptr;
  }
  if (!cfg.is_object()) {
    diags.push_back({"", 1, "configuration must be a JSON object"});
    return nullptr;
  }
  static const std::vector<std::string> top = {"kind",      "scheme", "parameters",    "tolerances", "seed",
                                               "output",    "assertions", "record_timings", "description"};
  for (const auto& [k, _] : cfg.items())
    if (std::find(top.begin(), top.end(), k) == top.end()) v.add({k}, "unknown field");
  const Builder* b = nullptr;
  if (!cfg.contains("kind")) {
    v.add({"kind"}, "missing required field");
  } else if (!cfg["kind"].is_string() ||
             std::find(kinds().begin(), kinds().end(), cfg["kind"].get<std::string>()) == kinds().end()) {
    v.add({"kind"}, "must be one of: phase, holonomy, scheme, grape, sweep, dd, dfs");
  } else {
    const std::string kind = cfg["kind"].get<std::string>();
    const auto list = builders_of(kind);
    if (cfg.contains("scheme")) {
      if (!cfg["scheme"].is_string() || !(b = find_builder(kind, cfg["scheme"].get<std::string>()))) {
        std::string names;
        for (const Builder* x : list) names += (names.empty() ? "" : ", ") + x->name;
        v.add({"scheme"}, "unknown " + kind + " scheme (available: " + names + ")");
      }
    } else if (list.size() == 1) {
      b = list.front();
    } else {
      v.add({"scheme"}, "missing required field for kind '" + kind + "'");
    }
  }
  if (cfg.contains("parameters") && !cfg["parameters"].is_object()) v.add({"parameters"}, "must be an object");
  if (b) {
    const json params = cfg.contains("parameters") && cfg["parameters"].is_object() ? cfg["parameters"] : json::object();
    for (const auto& [k, _] : params.items()) {
      const bool known = std::any_of(b->params.begin(), b->params.end(), [&](const Param& p) { return p.name == k; });
      if (!known) v.add({"parameters", k}, "unknown parameter for " + b->name);
    }
    for (const Param& p : b->params) {
      if (!params.contains(p.name)) {
        if (p.required) v.add({"parameters", p.name}, "missing required parameter '" + p.name + "' (" + p.doc + ")");
        continue;
      }
      check_param(v, p, params[p.name]);
    }
  }
  if (cfg.contains("tolerances")) {
    if (!cfg["tolerances"].is_object()) {
      v.add({"tolerances"}, "must be an object");
    } else {
      ToleranceConfig t;
      for (const auto& [k, val] : cfg["tolerances"].items()) {
        if (!val.is_number() || !(val.get<double>() > 0.0)) {
          v.add({"tolerances", k}, "must be a positive number");
        } else if (!t.set(k, val.get<double>())) {
          v.add({"tolerances", k}, "unknown tolerance");
        }
      }
    }
  }
  if (cfg.contains("seed") && !(cfg["seed"].is_number_unsigned() || (cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0)))
    v.add({"seed"}, "must be a non-negative integer");
  if (cfg.contains("output") && !cfg["output"].is_string()) v.add({"output"}, "must be a string");
  if (cfg.contains("record_timings") && !cfg["record_timings"].is_boolean()) v.add({"record_timings"}, "must be a boolean");
  if (cfg.contains("description") && !cfg["description"].is_string()) v.add({"description"}, "must be a string");
  if (cfg.contains("assertions")) {
    if (!cfg["assertions"].is_array()) {
      v.add({"assertions"}, "must be an array");
    } else {
      for (std::size_t k = 0; k < cfg["assertions"].size(); ++k) {
        const json& a = cfg["assertions"][k];
        const bool ok = a.is_object() && a.contains("quantity") && a["quantity"].is_string() &&
                        ((a.contains("max") && a["max"].is_number()) || (a.contains("min") && a["min"].is_number()));
        if (!ok) v.add({"assertions"}, "assertion " + std::to_string(k) + " needs {quantity, max and/or min}");
      }
    }
  }
  diags.insert(diags.end(), v.out.begin(), v.out.end());
  return diags.empty() ? b : nullptr;
}

json schema_json(const Builder& b) {
  json params = json::array();
  for (const Param& p : b.params) {
    json j = {{"name", p.name}, {"type", p.type}, {"required", p.required}};
    if (!p.required) j["default"] = p.def;
    if (p.min) j[p.exclusive ? "exclusive_minimum" : "minimum"] = *p.min;
    if (!p.choices.empty()) j["choices"] = p.choices;
    j["doc"] = p.doc;
    params.push_back(j);
  }
  return {{"kind", b.kind}, {"scheme", b.name}, {"description", b.doc}, {"parameters", params}};
}

const json* lookup(const json& root, const std::string& dotted) {
  const json* cur = &root;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cur;
}

}  // namespace

std::vector<Diagnostic> validate_config(const std::string& text) {
  json cfg;
  std::vector<Diagnostic> d;
  validate(text, cfg, d);
  return d;
}

std::string scheme_catalog() {
  json cat = json::array();
  for (const Builder& b : builders()) cat.push_back(schema_json(b));
  return json({{"hforge_version", version()}, {"kinds", kinds()}, {"schemes", cat}}).dump(2) + "\n";
}

RunResult run_config(const std::string& text, const RunOptions& options) {
  RunResult rr;
  json cfg;
  const Builder* b = validate(text, cfg, rr.diagnostics);
  if (!b) {
    rr.exit_code = kExitUsage;
    return rr;
  }
  if (cfg.contains("output")) rr.output_stem = cfg["output"].get<std::string>();

  Ctx c;
  c.threads = std::max(1, options.threads);
  c.seed = options.seed ? *options.seed : (cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : 0);
  json tol_src = json::object();
  if (cfg.contains("tolerances"))
    for (const auto& [k, val] : cfg["tolerances"].items()) c.tol.set(k, val.get<double>());
  for (const auto& [k, val] : options.tol_overrides) {
    if (!(val > 0.0) || !c.tol.set(k, val)) {
      rr.diagnostics.push_back({"--tol-override", 0, "unknown tolerance or non-positive value: " + k});
      rr.exit_code = kExitUsage;
      return rr;
    }
  }
  c.params = json::object();
  const json given = cfg.contains("parameters") ? cfg["parameters"] : json::object();
  for (const Param& p : b->params) c.params[p.name] = given.contains(p.name) ? given[p.name] : p.def;

  const bool timings = cfg.value("record_timings", false);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    b->run(c);
  } catch (const Error& e) {
    rr.diagnostics.push_back({"parameters", 0, e.what()});
    rr.exit_code = kExitUsage;
    return rr;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json checks = json::array();
  bool passed = true;
  for (const Check& k : c.checks) {
    const bool ok = std::isfinite(k.value) && (k.op == "<=" ? k.value <= k.bound : k.value >= k.bound);
    passed = passed && ok;
    checks.push_back({{"name", k.name}, {"value", k.value}, {"op", k.op}, {"bound", k.bound},
                      {"tolerance", k.tolerance}, {"passed", ok}, {"source", "builtin"}});
  }
  if (cfg.contains("assertions")) {
    for (const json& a : cfg["assertions"]) {
      const std::string q = a["quantity"].get<std::string>();
      const json* val = lookup(c.results, q);
      if (!val || !(val->is_number() || val->is_boolean())) {
        rr.diagnostics.push_back({"assertions", line_of(text, {"assertions"}),
                                  "quantity '" + q + "' is not a scalar result of " + b->name});
        rr.exit_code = kExitUsage;
        return rr;
      }
      const double x = val->is_boolean() ? (val->get<bool>() ? 1.0 : 0.0) : val->get<double>();
      for (const char* op : {"max", "min"}) {
        if (!a.contains(op)) continue;
        const double bound = a[op].get<double>();
        const bool ok = std::isfinite(x) && (op[1] == 'a' ? x <= bound : x >= bound);
        passed = passed && ok;
        checks.push_back({{"name", q}, {"value", x}, {"op", op[1] == 'a' ? "<=" : ">="}, {"bound", bound},
                          {"tolerance", "assertion"}, {"passed", ok}, {"source", "config"}});
      }
    }
  }

  json tol = json::object();
  for (const auto& [k, val] : c.tol.items()) tol[k] = val;
  json report;
  report["hforge_version"] = version();
  report["kind"] = b->kind;
  report["scheme"] = b->name;
  report["seed"] = c.seed;
  report["inputs"] = {{"parameters", c.params}};
  if (cfg.contains("description")) report["inputs"]["description"] = cfg["description"];
  report["units"] = {{"angle", "rad"},
                     {"frequency", "rad per time unit (hbar = 1)"},
                     {"time", "time unit; NV scenarios declare seconds per unit in parameters.time_unit_seconds"},
                     {"complex", "[re, im]"},
                     {"matrix", "row-major rows of [re, im]"}};
  report["tolerances"] = tol;
  report["results"] = c.results;
  report["assertions"] = checks;
  report["passed"] = passed;
  if (timings) report["timings"] = {{"run_seconds", elapsed}};
  rr.report = report.dump(2) + "\n";
  rr.csv = c.csv;
  rr.exit_code = passed ? kExitOk : kExitAssertion;
  return rr;
}

}  // namespace hforge
