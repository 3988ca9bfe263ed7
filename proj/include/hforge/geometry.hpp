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
#include <vector>

#include "hforge/qcore.hpp"

namespace hforge {

/// Abelian phase split of a (possibly cyclic) evolution.
struct PhaseDecomposition {
  double total = 0.0;       // continuously unwound arg<psi(0)|psi(T)>
  double dynamical = 0.0;   // -int <psi|H|psi> dt
  double geometric = 0.0;   // total - dynamical
  double total_principal = 0.0;      // total reduced to (-pi, pi]
  double geometric_principal = 0.0;  // geometric reduced to (-pi, pi]
  double cyclicity_residual = 0.0;   // 1 - |<psi(0)|psi(T)>|
};

/// Decomposes the phase of psi0 along the record. In strict mode a residual
/// above `cyclicity_tol` raises NotCyclicError.
PhaseDecomposition decompose_phase(const EvolutionRecord& record, const Vec& psi0,
                                   bool strict = false, double cyclicity_tol = 1e-8);

/// A closed loop in parameter space given through its Hamiltonian.
struct ParameterLoop {
  std::function<Mat(double)> sampler;  // s in [0, 1]
  int samples = 1000;
  bool closed = true;
};

/// -arg of the Bargmann product around a sequence of states, accumulated in a
/// gauge fixed by the first component that stays away from zero; falls back
/// to the principal value when no such component exists.
double wilson_loop_phase(const std::vector<Vec>& states);

/// Berry phase of eigenband `band` (ascending eigenvalue order).
double berry_phase_loop(const ParameterLoop& loop, int band,
                        const ToleranceConfig& tol = default_tolerances());

struct SolidAngle {
  double omega;
  double gamma_plus;
  double gamma_minus;
};
/// Spin-1/2 prediction: Omega = 2 pi (1 - cos theta), gamma_+- = -+ Omega / 2.
SolidAngle solid_angle_prediction(double theta);

/// Parallel-transport holonomy of an L-fold degenerate band starting at
/// ascending index `band`. The result acts on coefficients in the frame of
/// the band at s = 0.
Mat wilczek_zee_holonomy(const ParameterLoop& loop, int band, int degeneracy,
                         const ToleranceConfig& tol = default_tolerances());

/// Orthonormal L-frame sampled on a time grid.
struct MovingFrame {
  std::vector<double> grid;
  std::vector<Mat> vectors;  // dim x L per sample
  bool single_valued = false;

  int rank() const { return vectors.empty() ? 0 : int(vectors.front().cols()); }
};

MovingFrame frame_from_function(const std::function<Mat(double)>& f, double total_time, int steps,
                                bool single_valued = false);

struct HolonomyReport {
  std::vector<Mat> A_samples;
  std::vector<Mat> K_samples;
  Mat holonomy;            // acts on coefficients in the frame at t = 0
  Mat geometric_holonomy;  // same evolution with K dropped
  double max_K_norm = 0.0;
  double cyclicity_residual = 0.0;
  double frame_residual = 0.0;
  bool purely_geometric = false;
};

/// Splits U(T) on the frame's span into connection and dynamical parts.
HolonomyReport anandan_decomposition(const MovingFrame& frame, const EvolutionRecord& record,
                                     const ToleranceConfig& tol = default_tolerances());

/// Checks cyclicity of P(t) = U P0 U^dag and vanishing of P0 U^dag H U P0.
/// With `relaxed` the dynamical block may be a multiple of the identity.
HolonomyReport check_holonomic_conditions(const EvolutionRecord& record, const Mat& p0,
                                          const ToleranceConfig& tol = default_tolerances(),
                                          bool relaxed = false);

/// |phi_k>' = sum_l Omega_lk |phi_l> at every sample.
MovingFrame gauge_transform(const MovingFrame& frame, const std::vector<Mat>& omega,
                            double unitarity_tol = 1e-10);

}  // namespace hforge
