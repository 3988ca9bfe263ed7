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

#include "doctest.h"
#include "hforge/errors.hpp"
#include "hforge/geometry.hpp"
#include "hforge/gqc.hpp"
#include "oracles.hpp"

using namespace hforge;

TEST_CASE("spin field Hamiltonian") {
  SpinFieldParams p;
  p.mu_b0 = 2.0;
  p.theta = 0.5;
  const Mat h = spin_field_hamiltonian(p, 0.0);
  // mu B0 (sin th X + cos th Z) at phi = 0.
  CHECK((h - 2.0 * (std::sin(0.5) * pauli_x() + std::cos(0.5) * pauli_z())).norm() < 1e-14);
  const Vec up = spin_field_eigenstate(p, 0.0, true);
  CHECK(((h * up) - 2.0 * up).norm() < 1e-13);
}

TEST_CASE("AA phase: closed form against exact evolution") {
  SpinFieldParams p;
  p.mu_b0 = 1.3;
  p.theta = 0.8;
  p.omega = 0.9;
  const AaPrediction a = aa_closed_form(p);
  // tan(theta_bar) = 2 mu B0 sin th / (2 mu B0 cos th - omega).
  CHECK(std::tan(a.theta_bar) ==
        doctest::Approx(2 * 1.3 * std::sin(0.8) / (2 * 1.3 * std::cos(0.8) - 0.9)).epsilon(1e-12));
  const EvolutionRecord rec = aa_exact_record(p, 256);
  const PhaseDecomposition d = decompose_phase(rec, a.eta_plus, true);
  CHECK(angle_distance(d.geometric, -kPi * (1 - std::cos(a.theta_bar))) < 1e-9);
  p.omega = -0.9;
  const AaPrediction b = aa_closed_form(p);
  const PhaseDecomposition e = decompose_phase(aa_exact_record(p, 256), b.eta_plus, true);
  CHECK(angle_distance(e.geometric, kPi * (1 - std::cos(b.theta_bar))) < 1e-9);
}

TEST_CASE("adiabatic gate reports the Berry phases and warns when fast") {
  SpinFieldParams p;
  p.theta = kPi / 3;
  const AdiabaticGate slow = adiabatic_phase_gate(p, 2000.0);
  CHECK(slow.gamma_plus == doctest::Approx(-kPi / 2));
  CHECK_FALSE(slow.adiabaticity_warning);
  const AdiabaticGate fast = adiabatic_phase_gate(p, 5.0);
  CHECK(fast.adiabaticity_warning);
  CHECK_FALSE(fast.warning.empty());
}

TEST_CASE("spin echo removes the dynamical phase") {
  SpinFieldParams p;
  p.theta = 1.0;
  const double period = 400.0;
  p.omega = 2 * kPi / period;
  const ControlSchedule loop = spin_field_schedule(p, period);
  const Mat pi = -kI * pauli_dot({std::cos(1.0), 0.0, -std::sin(1.0)});
  const EchoResult e = spin_echo_gate(loop, pi);
  // Relative phase between the eigenstates is twice the Berry phase difference only.
  const double rel = std::arg(e.gate(0, 0) * std::conj(e.gate(1, 1)));
  const double omega = 2 * kPi * (1 - std::cos(1.0));
  CHECK(angle_distance(rel, 2.0 * (-omega / 2 - omega / 2)) < 1e-5);
}

TEST_CASE("dynamical-phase-free frequency") {
  CHECK(dynamical_free_frequency(1.0, 0.5) == doctest::Approx(-1.25));
  const EvolutionRecord r = dynamical_free_record(1.0, 0.5, 512);
  const PhaseDecomposition d = decompose_phase(r, r.initial_states.at(0), true);
  CHECK(std::abs(d.dynamical) < 1e-9);
}

TEST_CASE("Makhlin invariants separate local and entangling gates") {
  CHECK(is_local_two_qubit(kron(oracle::hadamard(), pauli_y())));
  CHECK_FALSE(is_local_two_qubit(oracle::diag({1, 1, 1, -1})));
}

TEST_CASE("conditional phase gate structure") {
  NmrParams p;
  p.omega1 = 0.3;
  p.omega = 0.8;
  p.J = 0.05;
  const ConditionalGate g = conditional_adiabatic_gate(p);
  const double d = g.delta_gamma;
  const Mat oracle = oracle::diag({std::exp(2.0 * kI * d), std::exp(-2.0 * kI * d), std::exp(-2.0 * kI * d),
                                   std::exp(2.0 * kI * d)});
  CHECK((g.gate - oracle).norm() < 1e-12);
}

TEST_CASE("two-loop schedule cancels the dynamical phase") {
  TwoLoopParams guess;
  guess.omega0 = 1.0;
  guess.omega1 = 0.6;
  guess.omega = 0.4;
  const TwoLoopResult r = two_loop_schedule(0.5, guess, 1024);
  CHECK(r.constraint_residual < 1e-9);
  CHECK(std::abs(wrap_angle(r.dynamical_sum)) < 1e-6);
}

TEST_CASE("orange-slice gate is e^{i gamma n.sigma}") {
  const OrangeSlice o = orange_slice_gate(0.6, 1.1, 0.4);
  const Eigen::Vector3d n(std::sin(1.1) * std::cos(0.4), std::sin(1.1) * std::sin(0.4), std::cos(1.1));
  const Mat oracle = std::cos(0.6) * identity(2) + kI * std::sin(0.6) * pauli_dot(n);
  CHECK(phase_aligned_distance(o.gate, oracle) < 1e-12);
  const Mat u = propagate(o.schedule, 64).final_propagator();
  CHECK(phase_aligned_distance(u.topLeftCorner(2, 2), oracle) < 1e-9);
}

TEST_CASE("driven oscillator phases") {
  const double b = 0.2, w = 0.9, t = 2 * kPi / w, r = b * b / (w * w);
  const OscillatorPhases e = unconventional_oscillator_phases(b, w, t);
  CHECK(e.total == doctest::Approx(2 * kPi * r));
  CHECK(e.dynamical == doctest::Approx(4 * kPi * r));
  CHECK(e.geometric == doctest::Approx(-2 * kPi * r));
}

TEST_CASE("ion gate yields CZ with local phases") {
  // (Omega_D / delta)^2 = 1/4 gives gamma = -pi/2.
  const IonGate g = ion_unconventional_gate(0.5, 1.0, 0.0);
  CHECK(g.gamma == doctest::Approx(-kPi / 2));
  CHECK(g.cz_residual < 1e-12);
}
