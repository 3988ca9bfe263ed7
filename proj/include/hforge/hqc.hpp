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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hforge/geometry.hpp"
#include "hforge/qcore.hpp"

namespace hforge {

// ---------------------------------------------------------------------------
// Lambda systems. Level order is (|0>, |1>, |e>).

/// Controls {X_0, Y_0, X_1, Y_1, |e><e|} with X_k = |e><k| + h.c. and
/// Y_k = i|e><k| - i|k><e|.
std::vector<Mat> lambda_control_basis();
/// Control coefficients of envelope * (w0 |e><0| + w1 |e><1| + h.c.) - detuning |e><e|.
RVec lambda_coefficients(cplx w0, cplx w1, double envelope, double detuning = 0.0);

struct LambdaParams {
  double theta = 0.0;       // w0 = sin(theta/2) e^{i phi}, w1 = -cos(theta/2)
  double phi = 0.0;
  double pulse_area = kPi;
  double duration = 1.0;
  double detuning = 0.0;
  std::string shape = "square";  // or "sin2"
};

struct LambdaGate {
  ControlSchedule schedule;
  Mat predicted;   // n.sigma
  Mat propagated;  // full 3x3 U(T)
  Mat gate;        // U(T) on Span{|0>, |1>}
  HolonomyReport report;
};
LambdaGate lambda_resonant_gate(const LambdaParams& p, const ToleranceConfig& tol = default_tolerances(),
                                int substeps = 256);

/// U(m) U(n) = (n.m) I - i sigma.(n x m).
Mat compose_lambda_gates(const Eigen::Vector3d& n, const Eigen::Vector3d& m);
/// n.sigma for the traceless gate.
Mat lambda_gate_matrix(const Eigen::Vector3d& n);

struct TwoQubitLambda {
  Mat he;          // 9x9
  Mat ha;          // 9x9
  Mat propagated;  // 9x9
  Mat gate;        // 4x4 on the computational block
  Mat predicted;
  double commutator = 0.0;        // ||[He, Ha]||
  double ha_block_residual = 0.0; // ||P0 e^{-i a Ha} P0 - P0||
  HolonomyReport report;
};
/// Two-ion effective Hamiltonian (index 3a + b, level 2 = e). `area` is the
/// integral of eta^2 Omega'(t) / delta.
TwoQubitLambda sm_two_qubit_gate(double theta, double phi, double area = kPi,
                                 const ToleranceConfig& tol = default_tolerances());

struct SingleShotGate {
  ControlSchedule schedule;
  double rotation_angle = 0.0;  // pi (1 + sin gamma)
  Eigen::Vector3d axis;
  Mat predicted;   // e^{-i phi n.sigma / 2}
  Mat propagated;  // 3x3
  Mat gate;        // 2x2 block
  HolonomyReport report;
};
/// Off-resonant Lambda gate with Omega T = pi. Non-square envelopes require
/// strict = false; the detuning then follows the envelope.
SingleShotGate single_shot_gate(double alpha, double beta, double gamma, double omega = 1.0,
                                const std::string& shape = "square", bool strict = true,
                                const ToleranceConfig& tol = default_tolerances());

struct MultiPulseSegment {
  double area = kPi / 2;
  double eta = 0.0;  // relative phase of the pulse pair
  Mat frame;         // V_j, 3x3 (empty: identity)
};

struct MultiPulseGate {
  ControlSchedule schedule;
  Mat propagated;  // 3x3 including the frame changes
  Mat gate;        // 2x2
  HolonomyReport report;  // only meaningful without frame changes
};
/// Single-loop multi-pulse gate starting from the bright state of (theta, phi).
MultiPulseGate multi_pulse_gate(double theta, double phi, const std::vector<MultiPulseSegment>& segments,
                                const ToleranceConfig& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Four-level and XY-auxiliary schemes

enum class FourLevelMode { BlockDiagonal, Swap };

struct FourLevelGate {
  Mat u_l, u_r;
  double alpha = 0.0, beta = 0.0;  // singular values, alpha >= beta
  double area = 0.0;
  Mat propagated;  // 4x4
  Mat predicted;   // closed-form block structure
  Mat u0, u1;      // diagonal blocks (block mode)
  double off_block_norm = 0.0;   // block mode: norm of off-diagonal blocks
  double diag_block_norm = 0.0;  // swap mode: norm of diagonal blocks
};
/// H = Omega(t) [[0, S], [S^dag, 0]]. With area <= 0 the smallest area that
/// meets the mode's commensurability condition (denominator <= 64) is used.
FourLevelGate four_level_gate(const Mat& s, FourLevelMode mode = FourLevelMode::BlockDiagonal, double area = 0.0,
                              double tol = 1e-9);

/// Deterministic SVD S = U_l diag(alpha, beta) U_r^dag.
void four_level_svd(const Mat& s, Mat& u_l, double& alpha, double& beta, Mat& u_r);

struct XyAuxGate {
  double area = 0.0;
  long odd_multiple = 0;         // a cos^2(theta/2) = n pi
  long even_multiple = 0;        // a sin^2(theta/2) ~= m pi
  bool exact = false;            // tan^2(theta/2) = p/q with q <= 64
  double phase_error = 0.0;      // |a sin^2(theta/2) - m pi|
  double leakage = 0.0;          // population left on the flipped auxiliary
  Mat full;       // 4x4, auxiliary first
  Mat gate;       // 2x2 target block for auxiliary |0>
  Mat predicted;  // cos(theta) sz - sin(theta)(cos b sx + sin b sy)
};
/// The auxiliary is the first tensor factor. Irrational tan^2(theta/2) is
/// approximated by the smallest odd multiple whose leakage is below
/// tol.leakage.
XyAuxGate xy_aux_single_gate(double theta, double beta, const ToleranceConfig& tol = default_tolerances(),
                             long max_multiple = 2000000);

struct XyAuxTwoQubit {
  double j13 = 0.0, j23 = 0.0, tau = 0.0;
  Mat h;          // 8x8, auxiliary rightmost
  Mat full;       // 8x8 U(tau)
  Mat gate;       // 4x4 on the targets, auxiliary in |0>
  Mat predicted;
  Mat v2_block;   // 3x3 on (|001>, |010>, |100>)
  double leakage = 0.0;
};
XyAuxTwoQubit xy_aux_two_qubit_gate(double theta, double omega = 1.0,
                                    const ToleranceConfig& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Tripod

struct TripodLoop {
  /// (theta, phi) at s in [0, 1]; must start and end at theta = 0.
  std::function<std::pair<double, double>(double)> path;
  int samples = 2000;
};
TripodLoop octant_loop(int samples = 2000);
/// theta: 0 -> theta0 at phi = 0, phi: 0 -> 2 pi at theta0, theta0 -> 0.
TripodLoop cap_loop(double theta0, int samples = 2000);

/// Four-level tripod Hamiltonians in the order (|0>, |1>, |a>, |e>).
Mat tripod_hamiltonian_z(double theta, double phi, double omega = 1.0);
Mat tripod_hamiltonian_y(double theta, double phi, double omega = 1.0);
/// Effective two-ion Hamiltonian on (|11>, |aa>, |ee>).
Mat tripod_pair_hamiltonian(double theta, double phi, double omega = 1.0);

struct TripodGates {
  double solid_angle = 0.0;  // oriented, int (1 - cos theta) dphi
  Mat u_z;
  double phi1 = 0.0;
  Mat u_y;
  double phi2 = 0.0;
  double phi3 = 0.0;
  Mat conditional;  // diag(1, 1, 1, e^{i phi3})
};
TripodGates tripod_gates(const TripodLoop& loop, const ToleranceConfig& tol = default_tolerances());

// ---------------------------------------------------------------------------
// Reverse engineering and counterdiabatic driving

enum class PathMode { Abelian, DynamicalFree, NonAbelian };

struct PathSpec {
  /// Orthonormal columns at local time s of segment j.
  std::function<Mat(std::size_t, double)> frame;
  std::vector<double> durations;
  PathMode mode = PathMode::Abelian;
  int auxiliary_count = 0;  // NonAbelian: number of completed auxiliary states
};

struct ReverseEngineered {
  ControlSchedule schedule;  // basis: hermitian_basis(dim)
  double hermiticity_residual = 0.0;
  double frame_residual = 0.0;
};
ReverseEngineered reverse_engineer_hamiltonian(const PathSpec& path, int probe_samples = 16);

/// U(t) of a schedule as a frame callable; constant segments are exact.
std::function<Mat(std::size_t, double)> schedule_frame(const ControlSchedule& schedule, int substeps = 256);

/// H0 + H_a with H_a = i sum_{p != q} P_p dH P_q / (E_q - E_p) over
/// eigenvalue clusters; a change in the cluster pattern raises
/// DegeneracyError.
ControlSchedule sta_counterdiabatic(const ControlSchedule& h0, const ToleranceConfig& tol = default_tolerances());
/// The counterdiabatic term alone at absolute time t.
Mat counterdiabatic_term(const ControlSchedule& h0, double t, const ToleranceConfig& tol = default_tolerances());

}  // namespace hforge
