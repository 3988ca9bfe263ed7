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

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hforge/errors.hpp"

namespace hforge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Central tolerance table. Every threshold used by a check lives here so
/// that a run can override it from its configuration.
struct ToleranceConfig {
  double unitarity = 1e-10;
  double hermiticity = 1e-12;
  double cyclicity = 1e-8;
  double holonomy = 1e-8;       // max_K_norm threshold for condition (ii)
  double degeneracy_spread = 1e-9;  // relative to ||H||
  double degeneracy_gap = 1e-6;     // relative to ||H||
  double frame = 1e-8;          // subspace / orthonormality checks
  double leakage = 1e-8;        // auxiliary population after a gate

  /// Sets a field by name; returns false for unknown keys.
  bool set(const std::string& key, double value);
  std::vector<std::pair<std::string, double>> items() const;
};

const ToleranceConfig& default_tolerances();

// ---------------------------------------------------------------------------
// Operators

Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat identity(int dim);
/// Computational basis ket |k> in dimension dim.
Vec basis_ket(int dim, int k);
/// n.sigma for a (not necessarily unit) real 3-vector.
Mat pauli_dot(const Eigen::Vector3d& n);
/// Outer product |a><b|.
Mat outer(const Vec& a, const Vec& b);

Mat kron(const Mat& a, const Mat& b);
Mat kron_all(const std::vector<Mat>& ops);
/// Single-site operator `op` on site `site` of an n-site register with local
/// dimension op.rows(); site 0 is the leftmost tensor factor.
Mat embed(const Mat& op, int site, int n_sites);
cplx expectation(const Vec& psi, const Mat& op);

bool is_hermitian(const Mat& h, double rel_tol = 1e-12);
double unitarity_residual(const Mat& u);
bool is_unitary(const Mat& u, double tol = 1e-10);
/// Operator norm for Hermitian input (largest |eigenvalue|), Frobenius otherwise.
double spectral_scale(const Mat& h);

/// e^{-iHt} from the Hermitian eigendecomposition of H.
Mat herm_expm(const Mat& h, double t);

/// min over chi of ||a - e^{i chi} b||_F.
double phase_aligned_distance(const Mat& a, const Mat& b);
/// The phase e^{i chi} that best aligns b to a.
cplx best_phase(const Mat& a, const Mat& b);

/// |Tr[V^dag U P]|^2 / L^2 with L = Tr P.
double gate_fidelity(const Mat& u, const Mat& v, const Mat& p);
/// Projector check; throws ProjectorError.
void require_projector(const Mat& p, double tol = 1e-10);
/// Orthonormal basis (dim x L) of the range of a projector. Diagonal 0/1
/// projectors keep computational ordering.
Mat projector_basis(const Mat& p);
/// Projector onto the listed computational basis states.
Mat basis_projector(int dim, const std::vector<int>& states);
/// Unitary factor of the polar decomposition m = W P.
Mat polar_unitary(const Mat& m);

/// Coordinates of a Hermitian matrix in the elementary Hermitian basis
/// returned by hermitian_basis(dim) (diagonal units, then X_kl and Y_kl for
/// k<l). The expansion is exact: H = sum_i c_i B_i.
std::vector<Mat> hermitian_basis(int dim);
RVec hermitian_coordinates(const Mat& h);

// ---------------------------------------------------------------------------
// Schedules and propagation

/// One piece of a control schedule. If `shape` is set it overrides the
/// constant coefficients and is evaluated at the local time s in [0, duration].
struct Segment {
  double duration = 0.0;
  RVec coeffs;
  std::function<RVec(double)> shape;
};

/// H(t) = drift + sum_k c_k(t) basis_k, piecewise in time.
struct ControlSchedule {
  std::vector<Mat> basis;
  std::vector<Segment> segments;
  Mat drift;  // optional, empty means zero

  int dim() const;
  double total_time() const;
  void validate() const;
  /// H at local time s of segment j.
  Mat hamiltonian(std::size_t j, double s) const;
  /// H at absolute time t (right-continuous at segment boundaries).
  Mat hamiltonian_at(double t) const;
  void append(const ControlSchedule& other);
  ControlSchedule reversed() const;
};

ControlSchedule constant_schedule(const Mat& h, double duration);

struct EvolutionRecord {
  std::vector<double> grid;
  std::vector<Mat> propagators;
  std::vector<Mat> hamiltonians;       // H(t_j) at the samples
  std::vector<Mat> step_hamiltonians;  // generator used on [t_j, t_{j+1}]
  std::vector<Vec> initial_states;

  int dim() const { return propagators.empty() ? 0 : int(propagators.front().rows()); }
  const Mat& final_propagator() const { return propagators.back(); }
  double total_time() const { return grid.back(); }
};

/// Midpoint-sampled piecewise-constant propagation.
EvolutionRecord propagate(const ControlSchedule& schedule, int substeps_per_segment = 64);

/// Builds a record from closed-form U(t) and H(t) on a uniform grid.
EvolutionRecord sample_evolution(double total_time, int steps,
                                 const std::function<Mat(double)>& propagator,
                                 const std::function<Mat(double)>& hamiltonian);

/// Concatenates records: the second one is applied after the first.
EvolutionRecord chain(const EvolutionRecord& first, const EvolutionRecord& second);

double wrap_angle(double a);  // into (-pi, pi]
/// Distance between two angles modulo 2 pi.
double angle_distance(double a, double b);

}  // namespace hforge
