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
#include "hforge/hqc.hpp"
#include "oracles.hpp"

using namespace hforge;

TEST_CASE("stationary eigenstate carries only a dynamical phase") {
  // H = E |0><0| for time T: total = dynamical = -E T, geometric = 0.
  const Mat h = oracle::diag({0.7, -0.2});
  const EvolutionRecord r = propagate(constant_schedule(h, 2.0), 64);
  const PhaseDecomposition d = decompose_phase(r, basis_ket(2, 0), true);
  CHECK(d.total == doctest::Approx(-1.4).epsilon(1e-12));
  CHECK(d.dynamical == doctest::Approx(-1.4).epsilon(1e-12));
  CHECK(std::abs(d.geometric) < 1e-12);
}

TEST_CASE("non-cyclic state is rejected in strict mode") {
  const EvolutionRecord r = propagate(constant_schedule(pauli_x(), 0.3), 8);
  CHECK_THROWS_AS(decompose_phase(r, basis_ket(2, 0), true), NotCyclicError);
  CHECK_NOTHROW(decompose_phase(r, basis_ket(2, 0), false));
}

TEST_CASE("Berry phase equals minus half the solid angle") {
  for (double th : {0.4, 1.2, 2.5}) {
    SpinFieldParams p;
    p.theta = th;
    const ParameterLoop loop = spin_field_loop(p, 4000);
    const double omega = 2 * kPi * (1 - std::cos(th));
    CHECK(angle_distance(berry_phase_loop(loop, 1), -omega / 2) < 1e-5);
    CHECK(angle_distance(berry_phase_loop(loop, 0), omega / 2) < 1e-5);
    const SolidAngle sa = solid_angle_prediction(th);
    CHECK(sa.omega == doctest::Approx(omega));
  }
}

TEST_CASE("degenerate band is rejected by the Abelian loop") {
  ParameterLoop loop;
  loop.sampler = [](double) { return identity(2); };
  loop.samples = 16;
  CHECK_THROWS_AS(berry_phase_loop(loop, 0), DegeneracyError);
}

TEST_CASE("Wilson loop phase is gauge invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<Vec> states;
  for (int k = 0; k <= 200; ++k) {
    Vec v(2);
    const double t = 2 * kPi * k / 200;
    v << std::cos(0.4), std::sin(0.4) * std::exp(kI * t);
    states.push_back(v);
  }
  const double base = wilson_loop_phase(states);
  for (auto& s : states) s *= std::exp(kI * u(rng));
  states.back() = states.front();
  CHECK(angle_distance(wilson_loop_phase(states), base) < 1e-12);
}

TEST_CASE("Wilczek-Zee holonomy of a trivial loop is the identity") {
  // Constant degenerate band: no transport.
  ParameterLoop loop;
  loop.sampler = [](double) { return oracle::diag({0.0, 0.0, 1.0}); };
  loop.samples = 32;
  const Mat u = wilczek_zee_holonomy(loop, 0, 2);
  CHECK((u - identity(2)).norm() < 1e-12);
}

TEST_CASE("resonant Lambda evolution satisfies the holonomic conditions") {
  const LambdaGate g = lambda_resonant_gate(LambdaParams{});
  const EvolutionRecord r = propagate(g.schedule, 256);
  const HolonomyReport rep = check_holonomic_conditions(r, basis_projector(3, {0, 1}));
  CHECK(rep.purely_geometric);
  CHECK(rep.max_K_norm < 1e-10);
  CHECK(rep.cyclicity_residual < 1e-10);
}

TEST_CASE("a dynamical evolution is not purely geometric") {
  const EvolutionRecord r = propagate(constant_schedule(oracle::diag({1.0, 0.0, 0.0}), 1.0), 16);
  const HolonomyReport rep = check_holonomic_conditions(r, basis_projector(3, {0, 1}));
  CHECK_FALSE(rep.purely_geometric);
  CHECK(rep.max_K_norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("holonomy transforms covariantly under a gauge change") {
  const LambdaGate g = lambda_resonant_gate(LambdaParams{0.7, 0.3});
  const EvolutionRecord rec = propagate(g.schedule, 400);
  MovingFrame frame;
  frame.grid = rec.grid;
  for (const Mat& u : rec.propagators) frame.vectors.push_back(u.leftCols(2));
  const HolonomyReport ref = anandan_decomposition(frame, rec);
  // In the co-moving frame the holonomy is the propagator restricted to P0.
  CHECK((ref.holonomy - rec.final_propagator().topLeftCorner(2, 2)).norm() < 1e-8);
  std::mt19937_64 rng(6);
  const Mat gen = oracle::random_hermitian(2, rng);
  std::vector<Mat> omega;
  for (double t : rec.grid) omega.push_back(herm_expm(gen, t));
  const HolonomyReport h = anandan_decomposition(gauge_transform(frame, omega), rec);
  CHECK((h.holonomy - omega.front().adjoint() * ref.holonomy * omega.front()).norm() < 1e-10);
  std::vector<Mat> bad(rec.grid.size(), 2.0 * identity(2));
  CHECK_THROWS_AS(gauge_transform(frame, bad), UnitarityError);
}
