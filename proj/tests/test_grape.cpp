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
#include "hforge/grape.hpp"
#include "hforge/hqc.hpp"
#include "oracles.hpp"

using namespace hforge;

namespace {
GrapeProblem toy(double eta) {
  GrapeProblem p;
  p.drift = Mat::Zero(2, 2);
  p.controls = {pauli_x()};
  p.target = pauli_x();
  p.p0 = identity(2);
  p.eta = eta;
  p.segments = 1;
  p.total_time = 1.0;
  return p;
}
}  // namespace

TEST_CASE("objective at an exact holonomic solution is one") {
  const NvSetup nv;
  const GrapeProblem p = nv_lambda_problem(oracle::hadamard(), nv);
  const RMat c = nv_resonant_controls(kPi / 4, 0.0, nv);
  const ObjectiveTerms t = objective_terms(c, p);
  CHECK(t.fidelity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.penalty < 1e-20);
  CHECK(t.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("zero controls give the drift overlap") {
  GrapeProblem p = toy(0.0);
  p.drift = 0.4 * pauli_z();
  const RMat c = RMat::Zero(1, 1);
  // |Tr[X^dag e^{-i 0.4 Z}]|^2 / 4 = 0.
  CHECK(objective(c, p) == doctest::Approx(0.0).epsilon(1e-14));
  p.target = identity(2);
  CHECK(objective(c, p) == doctest::Approx(std::pow(std::cos(0.4), 2)).epsilon(1e-13));
}

TEST_CASE("dynamical controls are penalized") {
  GrapeProblem p = toy(0.5);
  p.controls = {pauli_z()};
  p.p0 = basis_projector(2, {0});
  const RMat c = RMat::Constant(1, 1, 0.3);
  // P0 U^dag Z U P0 = |0><0| * 1 for Z-rotations; penalty = dt * 0.3^2.
  CHECK(objective_terms(c, p).penalty == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("global phase of the target does not matter") {
  GrapeProblem p = toy(0.0);
  const RMat c = RMat::Constant(1, 1, 0.7);
  const double a = objective(c, p);
  p.target *= std::exp(kI * 1.1);
  CHECK(objective(c, p) == doctest::Approx(a).epsilon(1e-14));
}

TEST_CASE("analytic and finite-difference gradients agree") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    GrapeProblem p;
    p.drift = 0.2 * oracle::random_hermitian(3, rng);
    p.controls = {oracle::random_hermitian(3, rng), oracle::random_hermitian(3, rng)};
    p.target = herm_expm(oracle::random_hermitian(3, rng), 1.0);
    p.p0 = basis_projector(3, {0, 1});
    p.eta = 0.1;
    p.segments = 6;
    const RMat c = random_controls(6, 2, 1.0, 50 + k);
    const RMat ga = objective_gradient(c, p), gf = objective_gradient(c, p, GradientMode::FiniteDifference);
    CHECK((ga - gf).norm() / gf.norm() < 1e-6);
  }
}

TEST_CASE("toy gradient drives omega tau toward pi/2") {
  const GrapeProblem p = toy(0.0);
  // O(w) = sin^2(w): positive slope below pi/2, negative above.
  CHECK(objective_gradient(RMat::Constant(1, 1, 1.0), p)(0, 0) > 0);
  CHECK(objective_gradient(RMat::Constant(1, 1, 2.0), p)(0, 0) < 0);
  CHECK(objective_gradient(RMat::Constant(1, 1, kPi / 2), p).norm() < 1e-10);
}

TEST_CASE("optimizer: zero iterations at an optimum, monotone trace, determinism") {
  const GrapeProblem p = toy(0.0);
  GrapeConfig cfg;
  cfg.target = 0.999;
  const OptimizedControls at = grape_optimize(p, cfg, RMat::Constant(1, 1, kPi / 2));
  CHECK(at.iterations == 0);
  CHECK(at.converged);
  cfg.step = 0.1;
  const OptimizedControls a = grape_optimize(p, cfg, RMat::Constant(1, 1, 0.2));
  CHECK(a.converged);
  for (std::size_t k = 1; k < a.trace.size(); ++k) CHECK(a.trace[k] >= a.trace[k - 1]);
  const OptimizedControls b = grape_optimize(p, cfg, RMat::Constant(1, 1, 0.2));
  CHECK(a.trace == b.trace);
}

TEST_CASE("infeasible duration is flagged") {
  GrapeProblem p = toy(0.0);
  p.amplitude_bound = 0.1;
  GrapeConfig cfg;
  cfg.max_iterations = 20;
  const OptimizedControls r = grape_optimize(p, cfg, RMat::Constant(1, 1, 0.05));
  CHECK_FALSE(r.converged);
  CHECK(r.speed_limited);
}

TEST_CASE("zero-variance noise leaves the objective unchanged") {
  const NvSetup nv;
  const GrapeProblem p = nv_lambda_problem(oracle::hadamard(), nv);
  const RMat c = nv_resonant_controls(kPi / 4, 0.0, nv);
  NoiseModel none;
  none.error_ops = {oracle::diag({-1, 1, 0})};
  none.error_params = {{Distribution::None, 0.0}};
  CHECK(averaged_objective(c, p, none, 5) == doctest::Approx(objective(c, p)).epsilon(1e-14));
}

TEST_CASE("noise averaging: below the noiseless value, quadrature converged, thread independent") {
  const NvSetup nv;
  const GrapeProblem p = nv_lambda_problem(oracle::hadamard(), nv);
  const NoiseModel noise = nv_noise_model(nv);
  const RMat c = nv_resonant_controls(kPi / 4, 0.0, nv);
  const double f5 = averaged_fidelity(c, p, noise, 5), f9 = averaged_fidelity(c, p, noise, 9);
  CHECK(f5 < objective_terms(c, p).fidelity);
  CHECK(std::abs(f5 - f9) < 1e-4);
  CHECK(averaged_fidelity(c, p, noise, 5, 3) == f5);
}

TEST_CASE("robustness sweep") {
  const NvSetup nv;
  const GrapeProblem p = nv_lambda_problem(oracle::hadamard(), nv);
  const RMat c = nv_resonant_controls(kPi / 4, 0.0, nv);
  const Mat e2 = nv_noise_model(nv).error_ops[0];
  const RobustnessMap m = robustness_sweep(c, p, e2, {-0.01, 0.0, 0.01}, {-1e-3, 0.0, 1e-3});
  CHECK(m.fidelity(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m.fidelity(0, 0) < 1.0);
  const RobustnessMap t = robustness_sweep(c, p, e2, {-0.01, 0.0, 0.01}, {-1e-3, 0.0, 1e-3}, FidelityMeasure::Trace, 4);
  CHECK(t.fidelity == m.fidelity);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](int i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) {
                    if (i == 7) throw ConfigError("boom");
                  }),
                  ConfigError);
}
