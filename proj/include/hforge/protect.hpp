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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hforge/qcore.hpp"

namespace hforge {

// ---------------------------------------------------------------------------
// Collective errors and noiseless subsystems. Qubit 0 is the leftmost
// tensor factor; sigma_z |0> = |0>.

/// S_a = 1/2 sum_k sigma_a^k for each requested axis in {'x', 'y', 'z'}.
std::vector<Mat> collective_error_ops(int n, const std::string& axes = "xyz");

struct NsSector {
  int twice_j = 0;  // 2J
  long long n = 0;  // multiplicity (noiseless subsystem dimension)
  long long d = 0;  // 2J + 1
  double j() const { return 0.5 * twice_j; }
};

struct NsDecomposition {
  int n_qubits = 0;
  std::vector<NsSector> sectors;  // ascending J
};
NsDecomposition ns_dimensions(int n);

/// The J = 1 sector of four qubits: 16 x 9 isometry with column 3 k + m for
/// multiplicity index k (coupling path) and magnetic index m (M = 1 - m).
Mat ns4_j1_basis();

struct NsLogicalOperator {
  Mat matrix;                             // 16 x 16, O (x) I_gauge on the J = 1 sector
  std::vector<std::array<int, 4>> perms;  // all 24 permutations of the qubits
  std::vector<cplx> coefficients;         // expansion in the permutation operators
  double residual = 0.0;                  // || matrix - sum c_p P_p ||
};
/// Logical 3 x 3 operator on the four-qubit J = 1 noiseless subsystem,
/// expressed through qubit permutation operators.
NsLogicalOperator ns4_logical_operator(const Mat& logical);
/// Unitary that permutes qubits: qubit k is moved to position perm[k].
Mat qubit_permutation(const std::vector<int>& perm);

// ---------------------------------------------------------------------------
// Decoherence-free codes

struct DfsCode {
  std::string name;
  int physical_qubits = 0;
  std::vector<Vec> logical_basis;
  std::vector<Vec> auxiliary_basis;

  /// Columns: logical basis followed by the auxiliary states.
  Mat isometry(bool with_auxiliary = false) const;
};

/// "DFS2": |01>, |10>. "DFS3" (qubits Qa, Q2, Q1): |010>, |001>, aux |100>.
/// "DFS4": |0001>, |0010>, aux |0100>, |1000>.
DfsCode make_dfs_code(const std::string& name);
Vec dfs_encode(const DfsCode& code, const Vec& logical);

/// XY (and Dzyaloshinskii-Moriya-type for complex couplings) schedule on the
/// DFS3 register whose restriction to (|0>_L, |1>_L, |a>_L) is the Lambda
/// Hamiltonian w0 |a><0| + w1 |a><1| + h.c. with w0 on the Qa-Q2 pair and
/// w1 on the Qa-Q1 pair. Basis: {sym(a,2), anti(a,2), sym(a,1), anti(a,1)}.
ControlSchedule dfs_logical_lambda(const DfsCode& code, cplx w0, cplx w1, double duration);

/// Process fidelity of the logical channel
///   rho -> tr_env[ V^dag U (V rho V^dag (x) |e><e|) U^dag V ]
/// against `target`. `u` acts on system (x) environment with the system first.
double logical_process_fidelity(const Mat& u, const Mat& isometry, const Mat& target, int env_dim = 1,
                                int env_state = 0);

// ---------------------------------------------------------------------------
// Dynamical decoupling

enum class DdKind { X, XY };

struct LinearCoupling {
  int qubit = 0;
  char axis = 'z';
  Mat env_op;
};

/// System qubits (x) environment; H_I = sum sigma_axis^qubit (x) E.
struct DdModel {
  int system_qubits = 1;
  Mat h_env;  // environment Hamiltonian (defines the environment dimension)
  std::vector<LinearCoupling> couplings;

  int env_dim() const { return int(h_env.rows()); }
  Mat h_int() const;
  Mat h_free() const;  // I (x) H_E + H_I
};

/// Decomposes a general interaction into the linear form; weight >= 2 system
/// terms raise ModelError. System-identity parts are folded into H_E.
DdModel dd_model_from_matrix(int system_qubits, const Mat& h_env, const Mat& h_int, double tol = 1e-12);

struct DdResult {
  Mat evolution;              // full system (x) environment unitary
  double total_time = 0.0;    // free evolution time
  double residual = 0.0;      // max |arg eig(U e^{i H_E T})|
  double second_order = 0.0;  // the same for the BCH commutator term
};

/// D_x = [tau, X, tau, X] or D_XY = [tau, X, tau, Y, tau, X, tau, Y] repeated
/// `cycles` times with X = (x)_k sigma_x^k. A positive `pulse_width` replaces
/// each ideal pulse by lambda sum_k sigma^k with width * lambda = pi / 2,
/// applied together with H_E + H_I.
DdResult dd_sequence(DdKind kind, double tau, int cycles, const DdModel& model, double pulse_width = 0.0);

// ---------------------------------------------------------------------------
// Noise

enum class Distribution { None, Fixed, Uniform, Gaussian };

struct NoiseParameter {
  Distribution kind = Distribution::None;
  double scale = 0.0;  // Fixed: value; Uniform: half-width; Gaussian: sigma
  double sample(std::mt19937_64& rng) const;
  void validate() const;
};

struct NoiseModel {
  std::vector<Mat> error_ops;                // E_l
  std::vector<NoiseParameter> error_params;  // delta_l
  NoiseParameter amplitude;                  // delta_1

  void validate(int dim) const;
};

struct NoiseSample {
  double amplitude = 0.0;
  std::vector<double> deltas;
};

/// One quasi-static draw per gate from an mt19937_64 stream seeded by `seed`;
/// the amplitude is drawn first, then the delta_l in order.
NoiseSample draw_noise(const NoiseModel& model, std::uint64_t seed);
/// H -> H_drift + sum delta_l E_l + (1 + delta_1) sum c_k H_k.
ControlSchedule apply_noise(const ControlSchedule& schedule, const NoiseModel& model, const NoiseSample& sample);
ControlSchedule noise_inject(const ControlSchedule& schedule, const NoiseModel& model, std::uint64_t seed);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
};
/// Gauss-Hermite rule for N(0, sigma^2) via Golub-Welsch.
Quadrature gauss_hermite(int n, double sigma);
/// Midpoint rule on [-half_width, half_width].
Quadrature uniform_midpoint(int n, double half_width);
/// The rule matching a parameter's distribution.
Quadrature quadrature_for(const NoiseParameter& p, int n);

}  // namespace hforge
