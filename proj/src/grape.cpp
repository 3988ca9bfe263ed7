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

#include "hforge/grape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <mutex>
#include <thread>

#include "hforge/hqc.hpp"

namespace hforge {

void GrapeProblem::validate() const {
  const int d = dim();
  if (d == 0) throw DimensionError("problem needs a projector");
  require_projector(p0);
  if (drift.rows() != d || drift.cols() != d) throw DimensionError("drift does not match the projector");
  if (target.rows() != d || target.cols() != d) throw DimensionError("target does not match the projector");
  if (controls.empty()) throw ConfigError("problem needs at least one control");
  for (const Mat& h : controls) {
    if (h.rows() != d || h.cols() != d) throw DimensionError("control operator does not match the projector");
    if (!is_hermitian(h)) throw HermiticityError("control operator is not Hermitian");
  }
  if (!is_hermitian(drift)) throw HermiticityError("drift is not Hermitian");
  if (segments < 1 || !(total_time > 0.0)) throw ConfigError("segments >= 1 and total_time > 0 required");
  if (eta < 0.0) throw ConfigError("penalty eta must be non-negative");
  if (!(amplitude_bound > 0.0)) throw ConfigError("amplitude bound must be positive");
}

ControlSchedule GrapeProblem::schedule(const RMat& c) const {
  if (c.rows() != segments || c.cols() != int(controls.size())) throw DimensionError("control matrix shape mismatch");
  ControlSchedule s;
  s.basis = controls;
  s.drift = drift;
  for (int j = 0; j < segments; ++j) {
    Segment seg;
    seg.duration = dt();
    seg.coeffs = c.row(j).transpose();
    s.segments.push_back(seg);
  }
  return s;
}

void GrapeConfig::validate() const {
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (!(target > 0.0 && target < 1.0)) throw ConfigError("target objective must lie in (0, 1)");
  if (max_iterations < 0) throw ConfigError("max_iterations must be non-negative");
  if (!(growth >= 1.0)) throw ConfigError("growth must be >= 1");
}

namespace {

struct SegmentData {
  Mat h;
  Mat v;       // eigenvectors
  RVec lam;    // eigenvalues
  Mat u;       // e^{-i h dt}
};

SegmentData segment(const GrapeProblem& p, const Mat& drift, const RMat& c, int j, double scale) {
  SegmentData s;
  s.h = drift;
  for (std::size_t k = 0; k < p.controls.size(); ++k) s.h += scale * c(j, k) * p.controls[k];
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s.h + s.h.adjoint()));
  s.v = es.eigenvectors();
  s.lam = es.eigenvalues();
  Vec ph(s.lam.size());
  for (Eigen::Index a = 0; a < ph.size(); ++a) ph(a) = std::exp(-kI * s.lam(a) * p.dt());
  s.u = s.v * ph.asDiagonal() * s.v.adjoint();
  return s;
}

// d e^{-i H dt} in direction hk, via divided differences in the eigenbasis.
Mat expm_derivative(const SegmentData& s, const Mat& hk, double dt) {
  const Eigen::Index d = s.lam.size();
  Mat m = s.v.adjoint() * hk * s.v;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      const double la = s.lam(a), lb = s.lam(b);
      const cplx ea = std::exp(-kI * la * dt);
      cplx g;
      if (std::abs(la - lb) * dt < 1e-8) {
        g = -kI * dt * ea;
      } else {
        g = (ea - std::exp(-kI * lb * dt)) / (la - lb);
      }
      m(a, b) *= g;
    }
  return s.v * m * s.v.adjoint();
}

struct Evaluation {
  ObjectiveTerms terms;
  RMat grad;
};

Evaluation evaluate(const RMat& c, const GrapeProblem& p, const Mat& drift, double scale, bool want_grad) {
  const int n = p.segments;
  const int k_ctrl = int(p.controls.size());
  const double dt = p.dt();
  const double l = p.p0.trace().real();
  std::vector<SegmentData> seg;
  seg.reserve(n);
  for (int j = 0; j < n; ++j) seg.push_back(segment(p, drift, c, j, scale));
  // W_j = U_{j-1} ... U_1 (propagator at the start of segment j).
  std::vector<Mat> w(n + 1);
  w[0] = identity(p.dim());
  for (int j = 0; j < n; ++j) w[j + 1] = seg[j].u * w[j];
  Evaluation ev;
  const cplx g = (p.target.adjoint() * w[n] * p.p0).trace();
  ev.terms.fidelity = std::norm(g) / (l * l);
  std::vector<Mat> a(n);
  double pen = 0.0;
  for (int j = 0; j < n; ++j) {
    // U^dag H U is constant across the segment, so the midpoint rule is exact.
    a[j] = p.p0 * w[j].adjoint() * seg[j].h * w[j] * p.p0;
    pen += a[j].squaredNorm();
  }
  ev.terms.penalty = pen * dt;
  ev.terms.value = ev.terms.fidelity - p.eta * ev.terms.penalty;
  if (!want_grad) return ev;

  ev.grad = RMat::Zero(n, k_ctrl);
  // Fidelity: dg = Tr[U_T^dag F_j dU_j W_j P0] with F_j = U_N ... U_{j+1}.
  Mat f = identity(p.dim());
  std::vector<Mat> back(n);
  for (int j = n - 1; j >= 0; --j) {
    back[j] = f;
    f = f * seg[j].u;
  }
  // Penalty costate: Lambda_m = C_{m+1} + U_{m+1}^dag Lambda_{m+1} U_{m+1}.
  std::vector<Mat> lambda(n, Mat::Zero(p.dim(), p.dim()));
  if (p.eta != 0.0) {
    for (int m = n - 2; m >= 0; --m) {
      const Mat b = w[m + 1] * a[m + 1] * w[m + 1].adjoint();
      const Mat cm = b * seg[m + 1].h - seg[m + 1].h * b;
      lambda[m] = cm + seg[m + 1].u.adjoint() * lambda[m + 1] * seg[m + 1].u;
    }
  }
  for (int j = 0; j < n; ++j) {
    const Mat left = p.target.adjoint() * back[j];
    const Mat right = w[j] * p.p0;
    for (int k = 0; k < k_ctrl; ++k) {
      const Mat hk = scale * p.controls[k];
      const Mat du = expm_derivative(seg[j], hk, dt);
      const cplx dg = (left * du * right).trace();
      double d = 2.0 * (std::conj(g) * dg).real() / (l * l);
      if (p.eta != 0.0) {
        const cplx direct = (a[j] * (p.p0 * w[j].adjoint() * hk * w[j] * p.p0)).trace();
        const cplx via = (lambda[j] * du * seg[j].u.adjoint()).trace();
        d -= p.eta * dt * 2.0 * (direct.real() + via.real());
      }
      ev.grad(j, k) = d;
    }
  }
  return ev;
}

Mat noisy_drift(const GrapeProblem& p, const NoiseModel& model, const NoiseSample& s) {
  Mat d = p.drift;
  for (std::size_t l = 0; l < model.error_ops.size(); ++l) d += s.deltas.at(l) * model.error_ops[l];
  return d;
}

}  // namespace

ObjectiveTerms objective_terms(const RMat& c, const GrapeProblem& p) {
  p.validate();
  if (c.rows() != p.segments || c.cols() != int(p.controls.size()))
    throw DimensionError("control matrix shape mismatch");
  return evaluate(c, p, p.drift, 1.0, false).terms;
}

double objective(const RMat& c, const GrapeProblem& p) { return objective_terms(c, p).value; }

RMat objective_gradient(const RMat& c, const GrapeProblem& p, GradientMode mode) {
  p.validate();
  if (c.rows() != p.segments || c.cols() != int(p.controls.size()))
    throw DimensionError("control matrix shape mismatch");
  if (mode == GradientMode::Analytic) return evaluate(c, p, p.drift, 1.0, true).grad;
  RMat g(c.rows(), c.cols());
  const double h = 1e-6 * std::max(1.0, c.cwiseAbs().maxCoeff());
  RMat x = c;
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
      x(j, k) = c(j, k) + h;
      const double up = evaluate(x, p, p.drift, 1.0, false).terms.value;
      x(j, k) = c(j, k) - h;
      const double dn = evaluate(x, p, p.drift, 1.0, false).terms.value;
      x(j, k) = c(j, k);
      g(j, k) = (up - dn) / (2.0 * h);
    }
  return g;
}

NoiseGrid noise_grid(const NoiseModel& model, int nodes) {
  if (model.error_ops.size() != model.error_params.size()) throw ConfigError("each error operator needs a distribution");
  std::vector<Quadrature> rules;
  rules.push_back(quadrature_for(model.amplitude, nodes));
  for (const NoiseParameter& q : model.error_params) rules.push_back(quadrature_for(q, nodes));
  NoiseGrid grid;
  std::vector<std::size_t> idx(rules.size(), 0);
  while (true) {
    NoiseSample s;
    double w = 1.0;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      w *= rules[r].weights[idx[r]];
      if (r == 0) {
        s.amplitude = rules[r].nodes[idx[r]];
      } else {
        s.deltas.push_back(rules[r].nodes[idx[r]]);
      }
    }
    grid.samples.push_back(s);
    grid.weights.push_back(w);
    std::size_t r = rules.size();
    while (r > 0) {
      --r;
      if (++idx[r] < rules[r].nodes.size()) break;
      idx[r] = 0;
      if (r == 0) return grid;
    }
    if (rules.empty()) return grid;
  }
}

ObjectiveTerms objective_terms(const RMat& c, const GrapeProblem& p, const NoiseModel& model, const NoiseSample& s) {
  p.validate();
  model.validate(p.dim());
  return evaluate(c, p, noisy_drift(p, model, s), 1.0 + s.amplitude, false).terms;
}

namespace {

template <class F>
std::vector<double> per_node(const NoiseGrid& grid, int threads, F f) {
  std::vector<double> out(grid.samples.size());
  parallel_for(int(grid.samples.size()), threads, [&](int i) { out[i] = f(grid.samples[i]); });
  return out;
}

}  // namespace

double averaged_objective(const RMat& c, const GrapeProblem& p, const NoiseModel& model, int nodes, int threads) {
  p.validate();
  model.validate(p.dim());
  const NoiseGrid grid = noise_grid(model, nodes);
  const auto vals = per_node(grid, threads, [&](const NoiseSample& s) {
    return evaluate(c, p, noisy_drift(p, model, s), 1.0 + s.amplitude, false).terms.value;
  });
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) acc += grid.weights[i] * vals[i];
  return acc;
}

double averaged_fidelity(const RMat& c, const GrapeProblem& p, const NoiseModel& model, int nodes, int threads) {
  p.validate();
  model.validate(p.dim());
  const NoiseGrid grid = noise_grid(model, nodes);
  const auto vals = per_node(grid, threads, [&](const NoiseSample& s) {
    return evaluate(c, p, noisy_drift(p, model, s), 1.0 + s.amplitude, false).terms.fidelity;
  });
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) acc += grid.weights[i] * vals[i];
  return acc;
}

RMat averaged_gradient(const RMat& c, const GrapeProblem& p, const NoiseModel& model, int nodes, GradientMode mode,
                       int threads) {
  p.validate();
  model.validate(p.dim());
  const NoiseGrid grid = noise_grid(model, nodes);
  std::vector<RMat> grads(grid.samples.size());
  parallel_for(int(grid.samples.size()), threads, [&](int i) {
    const NoiseSample& s = grid.samples[i];
    GrapeProblem q = p;
    q.drift = noisy_drift(p, model, s);
    // Amplitude error rescales the controls: dO/dc = (1 + d1) dO/dc'.
    grads[i] = (1.0 + s.amplitude) * objective_gradient((1.0 + s.amplitude) * c, q, mode);
  });
  RMat acc = RMat::Zero(c.rows(), c.cols());
  for (std::size_t i = 0; i < grads.size(); ++i) acc += grid.weights[i] * grads[i];
  return acc;
}

RMat random_controls(int segments, int n_controls, double box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RMat c(segments, n_controls);
  for (int j = 0; j < segments; ++j)
    for (int k = 0; k < n_controls; ++k) c(j, k) = box * (2.0 * double(rng() >> 11) * 0x1.0p-53 - 1.0);
  return c;
}

OptimizedControls grape_optimize(const GrapeProblem& p, const GrapeConfig& cfg, const RMat& initial,
                                 const NoiseModel* noise, int nodes, int threads) {
  p.validate();
  cfg.validate();
  if (initial.rows() != p.segments || initial.cols() != int(p.controls.size()))
    throw DimensionError("initial controls shape mismatch");
  auto value = [&](const RMat& c) {
    return noise ? averaged_objective(c, p, *noise, nodes, threads) : objective(c, p);
  };
  auto gradient = [&](const RMat& c) {
    return noise ? averaged_gradient(c, p, *noise, nodes, cfg.gradient, threads) : objective_gradient(c, p, cfg.gradient);
  };
  auto clip = [&](RMat c) {
    if (std::isfinite(p.amplitude_bound)) c = c.cwiseMax(-p.amplitude_bound).cwiseMin(p.amplitude_bound);
    return c;
  };
  OptimizedControls out;
  // Speed limit: a cyclic excursion out of the subspace needs an action of pi.
  double drive = spectral_scale(p.drift);
  for (const Mat& h : p.controls)
    drive += (std::isfinite(p.amplitude_bound) ? p.amplitude_bound : initial.cwiseAbs().maxCoeff()) *
             spectral_scale(h);
  out.speed_limited = drive * p.total_time < kPi;

  RMat c = clip(initial);
  double o = value(c);
  out.trace.push_back(o);
  double eps = cfg.step;
  int it = 0;
  while (o < cfg.target && it < cfg.max_iterations) {
    const RMat g = gradient(c);
    if (!g.allFinite()) break;
    RMat next = clip(c + eps * g);
    double on = value(next);
    if (cfg.line_search) {
      int halvings = 0;
      while (on <= o && halvings < 40) {
        eps *= 0.5;
        next = clip(c + eps * g);
        on = value(next);
        ++halvings;
      }
      if (on <= o) break;  // no ascent direction left
      eps *= cfg.growth;
    }
    c = next;
    o = on;
    out.trace.push_back(o);
    ++it;
  }
  out.controls = c;
  out.objective = o;
  out.iterations = it;
  out.converged = o >= cfg.target;
  out.terms = objective_terms(c, p);
  std::ostringstream os;
  if (out.converged) {
    os << "reached objective " << o << " >= " << cfg.target << " in " << it << " iterations";
  } else {
    os << "stopped at objective " << o << " < " << cfg.target << " after " << it << " iterations";
    if (out.speed_limited) os << " (total time below the speed limit for the amplitude box)";
  }
  out.message = os.str();
  out.holonomy = check_holonomic_conditions(propagate(p.schedule(c), 1), p.p0);
  return out;
}

RMat controls_from_schedule(const ControlSchedule& s, const GrapeProblem& p) {
  if (s.basis.size() != p.controls.size()) throw DimensionError("schedule basis does not match the problem controls");
  RMat c(p.segments, p.controls.size());
  for (int j = 0; j < p.segments; ++j) {
    const double t = (j + 0.5) * p.dt();
    double acc = 0.0;
    std::size_t seg = 0;
    while (seg + 1 < s.segments.size() && t >= acc + s.segments[seg].duration) acc += s.segments[seg++].duration;
    const Segment& sg = s.segments[seg];
    const RVec v = sg.shape ? sg.shape(t - acc) : sg.coeffs;
    c.row(j) = v.transpose();
  }
  return c;
}

double fidelity_measure(const Mat& u, const Mat& target, const Mat& p0, FidelityMeasure measure) {
  if (measure == FidelityMeasure::Trace) return gate_fidelity(u, target, p0);
  const double l = p0.trace().real();
  const Mat m = p0 * target.adjoint() * u * p0;
  return (std::norm(m.trace()) + (m.adjoint() * m).trace().real()) / (l * (l + 1.0));
}

RobustnessMap robustness_sweep(const RMat& c, const GrapeProblem& p, const Mat& e2, const std::vector<double>& delta1,
                               const std::vector<double>& delta2, FidelityMeasure measure, int threads) {
  p.validate();
  if (e2.rows() != p.dim() || e2.cols() != p.dim()) throw DimensionError("E2 does not match the problem");
  RobustnessMap map;
  map.delta1 = delta1;
  map.delta2 = delta2;
  map.fidelity = RMat::Zero(delta1.size(), delta2.size());
  const int cells = int(delta1.size() * delta2.size());
  parallel_for(cells, threads, [&](int i) {
    const std::size_t r = std::size_t(i) / delta2.size(), q = std::size_t(i) % delta2.size();
    Mat u = identity(p.dim());
    const Mat drift = p.drift + delta2[q] * e2;
    for (int j = 0; j < p.segments; ++j) {
      Mat h = drift;
      for (std::size_t k = 0; k < p.controls.size(); ++k) h += (1.0 + delta1[r]) * c(j, k) * p.controls[k];
      u = herm_expm(h, p.dt()) * u;
    }
    map.fidelity(r, q) = fidelity_measure(u, p.target, p.p0, measure);
  });
  return map;
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex mu;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------

GrapeProblem nv_lambda_problem(const Mat& gate, const NvSetup& nv) {
  if (gate.rows() != 2 || gate.cols() != 2) throw DimensionError("NV Lambda target must be 2x2");
  GrapeProblem p;
  p.drift = Mat::Zero(3, 3);
  const auto basis = lambda_control_basis();
  p.controls.assign(basis.begin(), basis.begin() + 4);
  p.target = identity(3);
  p.target.topLeftCorner(2, 2) = gate;
  p.p0 = basis_projector(3, {0, 1});
  p.eta = nv.eta;
  p.segments = nv.segments;
  p.total_time = nv.total_time;
  p.amplitude_bound = nv.amplitude_bound;
  return p;
}

NoiseModel nv_noise_model(const NvSetup& nv) {
  NoiseModel m;
  Mat e2 = Mat::Zero(3, 3);
  e2(0, 0) = -1.0;
  e2(1, 1) = 1.0;
  m.error_ops = {e2};
  m.error_params = {{Distribution::Gaussian, 2.0 * kPi * nv.thermal_sigma_hz * nv.time_unit_seconds}};
  m.amplitude = {Distribution::Uniform, nv.amplitude_half_width};
  return m;
}

RMat nv_resonant_controls(double theta, double phi, const NvSetup& nv) {
  const double omega = kPi / nv.total_time;
  const cplx w0 = std::sin(theta / 2) * std::exp(kI * phi);
  const cplx w1 = -std::cos(theta / 2);
  RMat c(nv.segments, 4);
  for (int j = 0; j < nv.segments; ++j) c.row(j) << omega * w0.real(), omega * w0.imag(), omega * w1.real(), omega * w1.imag();
  return c;
}

}  // namespace hforge
