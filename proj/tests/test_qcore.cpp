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
#include "hforge/qcore.hpp"
#include "oracles.hpp"

using namespace hforge;

TEST_CASE("pauli algebra") {
  const Mat x = pauli_x(), y = pauli_y(), z = pauli_z();
  CHECK((x * y - kI * z).norm() < 1e-15);
  CHECK((x * x - identity(2)).norm() < 1e-15);
  CHECK((pauli_dot({0, 0, 1}) - z).norm() < 1e-15);
}

TEST_CASE("kron and embed") {
  const Mat a = pauli_x(), b = pauli_z();
  const Mat k = kron(a, b);
  CHECK(k.rows() == 4);
  // (X (x) Z)|00> = |10>, index 2 with the first factor leftmost.
  CHECK(std::abs(k(2, 0) - 1.0) < 1e-15);
  CHECK((embed(a, 0, 2) - kron(a, identity(2))).norm() < 1e-15);
  CHECK((embed(a, 1, 3) - kron_all({identity(2), a, identity(2)})).norm() < 1e-15);
}

TEST_CASE("herm_expm agrees with a Taylor series") {
  std::mt19937_64 rng(1);
  for (int dim : {2, 3, 5}) {
    const Mat h = oracle::random_hermitian(dim, rng);
    CHECK((herm_expm(h, 0.7) - oracle::taylor_expm(h, 0.7)).norm() < 1e-11);
  }
  CHECK_THROWS_AS(herm_expm(pauli_x() + kI * pauli_z(), 1.0), HermiticityError);
}

TEST_CASE("gate comparison") {
  const Mat h = oracle::hadamard();
  CHECK(phase_aligned_distance(h, std::exp(kI * 0.9) * h) < 1e-14);
  CHECK(phase_aligned_distance(pauli_x(), pauli_z()) > 1.0);
  CHECK(gate_fidelity(h, std::exp(kI * 0.3) * h, identity(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gate_fidelity(pauli_x(), identity(2), identity(2)) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("projectors") {
  const Mat p = basis_projector(3, {0, 1});
  CHECK_NOTHROW(require_projector(p));
  CHECK_THROWS_AS(require_projector(0.5 * p), ProjectorError);
  CHECK(projector_basis(p).cols() == 2);
}

TEST_CASE("hermitian coordinates round trip") {
  std::mt19937_64 rng(2);
  const Mat h = oracle::random_hermitian(3, rng);
  const auto basis = hermitian_basis(3);
  CHECK(basis.size() == 9);
  const RVec c = hermitian_coordinates(h);
  Mat back = Mat::Zero(3, 3);
  for (std::size_t k = 0; k < basis.size(); ++k) back += c(Eigen::Index(k)) * basis[k];
  CHECK((back - h).norm() < 1e-13);
}

TEST_CASE("propagation of a constant schedule is exact") {
  std::mt19937_64 rng(3);
  const Mat h = oracle::random_hermitian(3, rng);
  const EvolutionRecord r = propagate(constant_schedule(h, 1.3), 8);
  CHECK((r.final_propagator() - oracle::taylor_expm(h, 1.3)).norm() < 1e-11);
  CHECK(r.total_time() == doctest::Approx(1.3));
}

TEST_CASE("shaped propagation converges at second order") {
  // H(t) = cos(t) X + sin(t) Z has no closed form; compare successive refinements.
  ControlSchedule s;
  s.basis = {pauli_x(), pauli_z()};
  Segment seg;
  seg.duration = 2.0;
  seg.shape = [](double t) {
    RVec c(2);
    c << std::cos(t), std::sin(t);
    return c;
  };
  s.segments.push_back(seg);
  const Mat fine = propagate(s, 4096).final_propagator();
  const double e1 = (propagate(s, 64).final_propagator() - fine).norm();
  const double e2 = (propagate(s, 128).final_propagator() - fine).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("reversed schedule inverts a constant evolution") {
  std::mt19937_64 rng(4);
  ControlSchedule s = constant_schedule(oracle::random_hermitian(2, rng), 0.5);
  s.append(constant_schedule(oracle::random_hermitian(2, rng), 0.8));
  const Mat u = propagate(s, 4).final_propagator();
  ControlSchedule r = s.reversed();
  for (Segment& seg : r.segments) seg.coeffs = -seg.coeffs;
  CHECK((propagate(r, 4).final_propagator() * u - identity(2)).norm() < 1e-12);
}

TEST_CASE("angles") {
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(angle_distance(0.1, 0.1 + 2 * kPi) < 1e-14);
}

TEST_CASE("tolerance table") {
  ToleranceConfig t;
  CHECK(t.set("leakage", 1e-6));
  CHECK(t.leakage == 1e-6);
  CHECK_FALSE(t.set("nope", 1.0));
  CHECK(t.items().size() == 8);
}
