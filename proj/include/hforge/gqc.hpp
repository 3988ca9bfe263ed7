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

#pragma once

#include <array>
#include <string>

#include "hforge/geometry.hpp"
#include "hforge/qcore.hpp"

namespace hforge {

// ---------------------------------------------------------------------------
// Spin-1/2 in a rotating field

struct SpinFieldParams {
  double mu_b0 = 1.0;  // field strength (angular frequency)
  double theta = 0.0;  // polar angle of the field
  double omega = 0.0;  // rotation frequency about z
  double phi0 = 0.0;   // initial azimuth
  /// Uncontrollable constant sigma_x term (e.g. a coupling that cannot be
  /// switched off). Zero by default.
  double residual_coupling = 0.0;
};

/// mu B0 [[cos th, e^{-i(wt+phi0)} sin th], [e^{i(wt+phi0)} sin th, -cos th]].
Mat spin_field_hamiltonian(const SpinFieldParams& p, double t);
/// Same field as a schedule over {sigma_x, sigma_y, sigma_z}.
ControlSchedule spin_field_schedule(const SpinFieldParams& p, double total_time);
/// Instantaneous eigenstate (+ : aligned with the field) in the gauge whose
/// |0> component is real.
Vec spin_field_eigenstate(const SpinFieldParams& p, double t, bool plus);
/// The loop phi: 0 -> 2 pi at fixed theta.
ParameterLoop spin_field_loop(const SpinFieldParams& p, int samples);

/// Exact record for H(t) = V e^{-i w t G} H0 e^{i w t G} V^dag, whose
/// propagator is V e^{-i w t G} e^{-i (H0 - w G) t} V^dag.
EvolutionRecord rotating_frame_record(const Mat& h0, const Mat& generator, double omega, double total_time,
                                      int steps, const Mat& frame = Mat());

struct AaPrediction {
  double theta_bar;
  double gamma_plus;   // -sgn(omega) pi (1 - cos theta_bar)
  double gamma_minus;  // -sgn(omega) pi (1 + cos theta_bar)
  Vec eta_plus;
  Vec eta_minus;
};
AaPrediction aa_closed_form(const SpinFieldParams& p);
/// Exact rotating-frame evolution over one period 2 pi / omega.
EvolutionRecord aa_exact_record(const SpinFieldParams& p, int steps = 512);

struct AdiabaticGate {
  ControlSchedule schedule;
  Mat gate;  // diag(e^{i gamma_+}, e^{i gamma_-}) in the (phi_+, phi_-) basis
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double dynamical_plus = 0.0;
  double dynamical_minus = 0.0;
  double adiabaticity = 0.0;  // omega / (mu B0)
  bool adiabaticity_warning = false;
  std::string warning;
};
/// One loop of duration T (omega = 2 pi / T).
AdiabaticGate adiabatic_phase_gate(const SpinFieldParams& p, double total_time, double adiabatic_bound = 0.05);

enum class EchoMode { Adiabatic, Propagate };

struct EchoResult {
  ControlSchedule forward;
  ControlSchedule backward;
  Mat eigenbasis;   // columns: upper, lower eigenvector of H(0)
  Mat total;        // lab-frame unitary of C -> pi -> C-bar -> pi
  Mat gate;         // total in the eigenbasis
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
};
/// Spin-echo composite. In adiabatic mode each traversal is the ideal
/// transport diag(e^{i(gamma + dyn)}) in the eigenbasis of H(0); in propagate
/// mode the schedules are integrated. `injected` (2x2, eigenbasis) is applied
/// after each traversal to emulate extra dynamical phases.
EchoResult spin_echo_gate(const ControlSchedule& loop, const Mat& pi_pulse, EchoMode mode = EchoMode::Adiabatic,
                          const Mat& injected = Mat(), int samples = 4000);

// ---------------------------------------------------------------------------
// NMR

struct NmrParams {
  double omega0 = 1.0;  // Larmor frequency of the driven qubit
  double omega1 = 0.0;  // drive amplitude
  double omega = 0.0;   // drive frequency
  double phi = 0.0;     // drive phase
  double J = 0.0;       // coupling
};

/// omega0/2 sz + omega1/2 (cos(wt+phi) sx + sin(wt+phi) sy).
Mat nmr_hamiltonian(const NmrParams& p, double t);

struct ConditionalGate {
  double delta_gamma = 0.0;
  Mat gate;  // diag(e^{2i d}, e^{-2i d}, e^{-2i d}, e^{2i d})
};
/// The generalized-echo conditional phase gate. The formula's omega1 enters
/// without squaring, as printed.
ConditionalGate conditional_adiabatic_gate(const NmrParams& p);

/// Makhlin invariants (G1, G2) of a two-qubit unitary.
std::pair<cplx, double> makhlin_invariants(const Mat& u);
bool is_local_two_qubit(const Mat& u, double tol = 1e-9);

/// omega = -(omega0^2 + omega1^2) / omega0.
double dynamical_free_frequency(double omega0, double omega1);
/// Field of nmr_hamiltonian plus the compensating omega sz / 2 term at the
/// dynamical-free frequency; the returned record starts from the upper
/// eigenstate of H(0), which is stored in initial_states.
EvolutionRecord dynamical_free_record(double omega0, double omega1, int steps = 512);

struct SSequence {
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double phi_prime = 0.0;
  double t_c = 0.0;
  double theta0 = 0.0;  // control qubit in |0>
  double theta1 = 0.0;  // control qubit in |1>
  Mat u0;               // preparation on the driven qubit, control in |0>
  Mat u1;
  Mat conditional;      // driven (x) control, 4x4
};
/// Solves tan(phi' + J t_c) = d+/w1, tan(phi' - J t_c) = d-/w1 with
/// d+- = omega0 - omega +- J and assembles the five-step preparation.
SSequence s_sequence(const NmrParams& p);

struct TwoLoopParams {
  double omega0 = 1.0, omega1 = 1.0, omega = 0.5;
  double omega0p = 1.0, omega1p = 1.0;
};
std::array<double, 2> two_loop_constraints(const TwoLoopParams& q, double gamma_over_pi);

struct TwoLoopResult {
  TwoLoopParams params;
  double alpha = 0.0;
  double alpha_p = 0.0;
  int iterations = 0;
  double constraint_residual = 0.0;
  ControlSchedule loop1;
  ControlSchedule loop2;
  PhaseDecomposition phases1;
  PhaseDecomposition phases2;
  double dynamical_sum = 0.0;
  double geometric_sum = 0.0;
  Vec initial_state;
  Mat gate;  // U2(tau) U1(tau)
};
/// Solves the two constraints for (omega0', omega1') by damped Newton from
/// the supplied guess and verifies the loops by exact propagation.
TwoLoopResult two_loop_schedule(double gamma_over_pi, const TwoLoopParams& guess, int steps = 1024);

struct OrangeSlice {
  ControlSchedule schedule;
  Mat gate;  // e^{i gamma n.sigma}
  Eigen::Vector3d axis;
};
/// Three-window resonant construction; `shape` is "square" or "sin2".
OrangeSlice orange_slice_gate(double gamma, double theta, double phi, const std::string& shape = "square",
                              double window = 1.0);

struct OscillatorPhases {
  double total, dynamical, geometric;
};
OscillatorPhases unconventional_oscillator_phases(double beta, double omega, double t);

struct FockPhases {
  PhaseDecomposition phases;
  double truncation_leakage = 0.0;
  std::vector<double> times;
  std::vector<double> dynamical;  // running values on the grid
  std::vector<double> geometric;
};
/// Truncated-Fock oracle for H = beta (a^dag e^{iwt} + a e^{-iwt}) from |0>.
FockPhases oscillator_fock_phases(double beta, double omega, double t, int n_cut = 40, int steps = 4000);

struct IonGate {
  double gamma = 0.0;      // -2 pi (Omega_D / delta)^2
  double geometric = 0.0;  // -gamma
  double dynamical = 0.0;  // 2 gamma
  double loop_integral = 0.0;  // Im of the closed displacement integral of z* dz
  double enclosed_area = 0.0;
  Mat gate;
  Mat cz;                  // U(-pi/2) (S (x) S)
  double cz_residual = 0.0;
};
IonGate ion_unconventional_gate(double omega_d, double delta, double phi, int loop_samples = 4096);

}  // namespace hforge
