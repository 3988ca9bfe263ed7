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

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hforge/geometry.hpp"
#include "hforge/protect.hpp"
#include "hforge/qcore.hpp"

namespace hforge {

using RMat = Eigen::MatrixXd;

/// H(t) = H_s + sum_k c_k(j) H_k on N equal segments of [0, tau].
struct GrapeProblem {
  Mat drift;                  // H_s
  std::vector<Mat> controls;  // H_k
  Mat target;                 // U_T
  Mat p0;                     // projector on the computational subspace
  double eta = 0.0;           // penalty weight
  int segments = 100;
  double total_time = 1.0;
  double amplitude_bound = std::numeric_limits<double>::infinity();  // |c| box

  int dim() const { return int(p0.rows()); }
  double dt() const { return total_time / segments; }
  void validate() const;
  /// The piecewise-constant schedule for an N x K control matrix.
  ControlSchedule schedule(const RMat& c) const;
};

enum class GradientMode { Analytic, FiniteDifference };

struct GrapeConfig {
  double step = 1e-3;        // epsilon
  double target = 0.999;     // O_p
  int max_iterations = 500;
  GradientMode gradient = GradientMode::Analytic;
  bool line_search = true;   // halve epsilon until O increases
  double growth = 1.5;       // epsilon multiplier after an accepted step (line search only)
  void validate() const;
};

struct ObjectiveTerms {
  double fidelity = 0.0;  // |Tr[U_T^dag U(tau) P0]|^2 / L^2
  double penalty = 0.0;   // int ||P0 U^dag H U P0||_F^2 dt (segment midpoints)
  double value = 0.0;     // fidelity - eta * penalty
};

ObjectiveTerms objective_terms(const RMat& c, const GrapeProblem& p);
double objective(const RMat& c, const GrapeProblem& p);
/// dO/dc (N x K). Finite differences use central steps of 1e-6 * max(1, |c|).
RMat objective_gradient(const RMat& c, const GrapeProblem& p, GradientMode mode = GradientMode::Analytic);

/// Noise grid for the averaged objective: tensor product of the quadrature
/// rules of the amplitude error and each error operator.
struct NoiseGrid {
  std::vector<NoiseSample> samples;
  std::vector<double> weights;
};
NoiseGrid noise_grid(const NoiseModel& model, int nodes);

/// O(c, delta) for one noise sample.
ObjectiveTerms objective_terms(const RMat& c, const GrapeProblem& p, const NoiseModel& model, const NoiseSample& s);
/// Sum_i w_i O(c, delta_i) and its gradient; nodes are evaluated on up to
/// `threads` workers and reduced in a fixed order.
double averaged_objective(const RMat& c, const GrapeProblem& p, const NoiseModel& model, int nodes,
                          int threads = 1);
RMat averaged_gradient(const RMat& c, const GrapeProblem& p, const NoiseModel& model, int nodes,
                       GradientMode mode = GradientMode::Analytic, int threads = 1);
/// Noise-averaged fidelity term alone.
double averaged_fidelity(const RMat& c, const GrapeProblem& p, const NoiseModel& model, int nodes, int threads = 1);

struct OptimizedControls {
  RMat controls;
  ObjectiveTerms terms;       // at the returned controls, noiseless
  double objective = 0.0;     // the optimized (possibly averaged) objective
  std::vector<double> trace;  // objective after each accepted iteration (first entry: initial)
  int iterations = 0;
  bool converged = false;
  bool speed_limited = false;  // tau * max drive norm below pi
  std::string message;
  HolonomyReport holonomy;
};

/// Gradient ascent c <- clip(c + eps grad O). With a noise model the averaged
/// objective is optimized.
OptimizedControls grape_optimize(const GrapeProblem& p, const GrapeConfig& cfg, const RMat& initial,
                                 const NoiseModel* noise = nullptr, int nodes = 5, int threads = 1);

/// Uniform random controls in [-box, box] from mt19937_64(seed).
RMat random_controls(int segments, int n_controls, double box, std::uint64_t seed);

/// Samples a piecewise-constant control matrix from a schedule whose basis
/// matches the problem controls (midpoint of each grape segment).
RMat controls_from_schedule(const ControlSchedule& s, const GrapeProblem& p);

enum class FidelityMeasure { Trace, Average };

struct RobustnessMap {
  std::vector<double> delta1;
  std::vector<double> delta2;
  RMat fidelity;  // rows: delta1, cols: delta2
};
/// Gate fidelity of U(delta1, delta2) vs the target on P0 with
/// H = H_s + delta2 E2 + (1 + delta1) sum c H_k. Average uses
/// (|Tr M|^2 + Tr M^dag M) / (L (L + 1)) with M = P0 U_T^dag U P0.
RobustnessMap robustness_sweep(const RMat& c, const GrapeProblem& p, const Mat& e2, const std::vector<double>& delta1,
                               const std::vector<double>& delta2, FidelityMeasure measure = FidelityMeasure::Trace,
                               int threads = 1);
double fidelity_measure(const Mat& u, const Mat& target, const Mat& p0, FidelityMeasure measure);

/// Runs f(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

// ---------------------------------------------------------------------------
// NV-centre Lambda mapping (1 time unit = 1 ns, frequencies in rad/ns)

struct NvSetup {
  double time_unit_seconds = 1e-9;
  double thermal_sigma_hz = 130e3;
  double amplitude_half_width = 0.02;
  double total_time = 400.0;
  int segments = 100;
  double eta = 1e-6;
  double amplitude_bound = 0.1;
};
/// Lambda problem (controls {X0, Y0, X1, Y1}) targeting `gate` on
/// Span{|0>, |1>}; E2 = diag(-1, 1, 0).
GrapeProblem nv_lambda_problem(const Mat& gate, const NvSetup& nv = NvSetup());
/// Thermal Gaussian on E2 (sigma = 2 pi f t_unit) and uniform amplitude error.
NoiseModel nv_noise_model(const NvSetup& nv = NvSetup());
/// Controls of the resonant Lambda gate n.sigma on the problem grid.
RMat nv_resonant_controls(double theta, double phi, const NvSetup& nv = NvSetup());

}  // namespace hforge
