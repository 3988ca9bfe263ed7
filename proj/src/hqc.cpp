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

#include "hforge/hqc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hforge {

namespace {

// Fourth-order derivative of f on [0, d] that never leaves the interval.
Mat derivative(const std::function<Mat(double)>& f, double s, double d) {
  const double h = std::max(1e-3 * d, 1e-9);
  if (s - 2 * h >= 0.0 && s + 2 * h <= d)
    return (f(s - 2 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2 * h)) / (12.0 * h);
  const double sg = (s - 2 * h < 0.0) ? 1.0 : -1.0;
  auto g = [&](int k) { return f(s + sg * k * h); };
  return sg * (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h);
}

Mat block(const Mat& u, const std::vector<int>& idx) {
  Mat out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = u(idx[r], idx[c]);
  return out;
}

ControlSchedule hermitian_schedule(const std::vector<std::pair<double, Mat>>& pieces) {
  ControlSchedule s;
  const int d = int(pieces.front().second.rows());
  s.basis = hermitian_basis(d);
  for (const auto& [dur, h] : pieces) {
    Segment seg;
    seg.duration = dur;
    seg.coeffs = hermitian_coordinates(h);
    s.segments.push_back(seg);
  }
  return s;
}

// Best rational approximation p/q of x >= 0 with q <= qmax.
std::pair<long, long> best_rational(double x, long qmax) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const long a = long(std::floor(r));
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - double(a);
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (q1 == 0) return {long(std::llround(x)), 1};
  return {p1, q1};
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Lambda

std::vector<Mat> lambda_control_basis() {
  std::vector<Mat> b;
  for (int k = 0; k < 2; ++k) {
    Mat x = Mat::Zero(3, 3), y = Mat::Zero(3, 3);
    x(2, k) = x(k, 2) = 1.0;
    y(2, k) = kI;
    y(k, 2) = -kI;
    b.push_back(x);
    b.push_back(y);
  }
  Mat e = Mat::Zero(3, 3);
  e(2, 2) = 1.0;
  b.push_back(e);
  return b;
}

RVec lambda_coefficients(cplx w0, cplx w1, double envelope, double detuning) {
  RVec c(5);
  c << envelope * w0.real(), envelope * w0.imag(), envelope * w1.real(), envelope * w1.imag(), -detuning;
  return c;
}

namespace {

// Envelope with a prescribed area over `duration`.
std::function<double(double)> envelope(const std::string& shape, double area, double duration) {
  if (duration <= 0.0) throw PulseShapeError("pulse duration must be positive");
  if (shape == "square") return [a = area / duration](double) { return a; };
  if (shape == "sin2") {
    const double amp = 2.0 * area / duration;
    return [amp, duration](double t) { return amp * std::pow(std::sin(kPi * t / duration), 2); };
  }
  throw PulseShapeError("unknown pulse shape '" + shape + "'");
}

Segment envelope_segment(const std::string& shape, double area, double duration, const RVec& unit) {
  Segment seg;
  seg.duration = duration;
  if (shape == "square") {
    seg.coeffs = unit * (area / duration);
  } else {
    auto env = envelope(shape, area, duration);
    seg.shape = [env, unit](double t) { return RVec(unit * env(t)); };
    seg.coeffs = seg.shape(0.0);
  }
  return seg;
}

}  // namespace

Mat lambda_gate_matrix(const Eigen::Vector3d& n) { return pauli_dot(n); }

LambdaGate lambda_resonant_gate(const LambdaParams& p, const ToleranceConfig& tol, int substeps) {
  if (p.detuning != 0.0) throw ConfigError("resonant Lambda gate requires zero detuning");
  if (std::abs(p.pulse_area - kPi) > 1e-12) {
    std::ostringstream os;
    os << "pulse area " << p.pulse_area << " does not close the loop (needs pi)";
    throw CyclicityError(os.str());
  }
  const cplx w0 = std::sin(p.theta / 2) * std::exp(kI * p.phi);
  const cplx w1 = -std::cos(p.theta / 2);
  LambdaGate g;
  g.schedule.basis = lambda_control_basis();
  g.schedule.segments.push_back(envelope_segment(p.shape, p.pulse_area, p.duration, lambda_coefficients(w0, w1, 1.0)));
  const Eigen::Vector3d n(std::sin(p.theta) * std::cos(p.phi), std::sin(p.theta) * std::sin(p.phi), std::cos(p.theta));
  g.predicted = lambda_gate_matrix(n);
  const EvolutionRecord rec = propagate(g.schedule, substeps);
  g.propagated = rec.final_propagator();
  g.gate = g.propagated.topLeftCorner(2, 2);
  g.report = check_holonomic_conditions(rec, basis_projector(3, {0, 1}), tol);
  return g;
}

Mat compose_lambda_gates(const Eigen::Vector3d& n, const Eigen::Vector3d& m) {
  return n.dot(m) * identity(2) - kI * pauli_dot(n.cross(m));
}

TwoQubitLambda sm_two_qubit_gate(double theta, double phi, double area, const ToleranceConfig& tol) {
  if (std::abs(area - kPi) > 1e-12) throw CyclicityError("two-ion Lambda gate requires area pi");
  auto idx = [](int a, int b) { return 3 * a + b; };
  TwoQubitLambda g;
  g.he = Mat::Zero(9, 9);
  g.ha = Mat::Zero(9, 9);
  const cplx c00 = std::sin(theta / 2) * std::exp(kI * phi / 2.0);
  const cplx c11 = -std::cos(theta / 2) * std::exp(-kI * phi / 2.0);
  g.he(idx(2, 2), idx(0, 0)) = c00;
  g.he(idx(2, 2), idx(1, 1)) = c11;
  g.ha(idx(2, 0), idx(0, 2)) = std::sin(theta / 2);
  g.ha(idx(2, 1), idx(1, 2)) = -std::cos(theta / 2);
  g.he += Mat(g.he.adjoint());
  g.ha += Mat(g.ha.adjoint());
  g.commutator = (g.he * g.ha - g.ha * g.he).norm();
  const Mat h = g.he + g.ha;
  const EvolutionRecord rec = propagate(constant_schedule(h, area), 64);
  g.propagated = rec.final_propagator();
  const std::vector<int> comp = {idx(0, 0), idx(0, 1), idx(1, 0), idx(1, 1)};
  g.gate = block(g.propagated, comp);
  g.predicted = Mat::Zero(4, 4);
  g.predicted(0, 0) = std::cos(theta);
  g.predicted(0, 3) = std::sin(theta) * std::exp(-kI * phi);
  g.predicted(3, 0) = std::sin(theta) * std::exp(kI * phi);
  g.predicted(3, 3) = -std::cos(theta);
  g.predicted(1, 1) = g.predicted(2, 2) = 1.0;
  Mat p0 = basis_projector(9, comp);
  g.ha_block_residual = (p0 * herm_expm(g.ha, area) * p0 - p0).norm();
  g.report = check_holonomic_conditions(rec, p0, tol);
  return g;
}

SingleShotGate single_shot_gate(double alpha, double beta, double gamma, double omega, const std::string& shape,
                                bool strict, const ToleranceConfig& tol) {
  if (omega <= 0.0) throw ConfigError("Rabi frequency must be positive");
  if (strict && shape != "square") throw PulseShapeError("single-shot gate requires a square pulse in strict mode");
  SingleShotGate g;
  const double duration = kPi / omega;
  // Bright state cos(a)|0> + e^{i b} sin(a)|1>; the couplings are its conjugate.
  const cplx w0 = std::cos(alpha) * std::cos(gamma);
  const cplx w1 = std::sin(alpha) * std::cos(gamma) * std::exp(-kI * beta);
  const RVec unit = lambda_coefficients(w0, w1, 1.0, -2.0 * std::sin(gamma));
  g.schedule.basis = lambda_control_basis();
  g.schedule.segments.push_back(envelope_segment(shape, kPi, duration, unit));
  g.rotation_angle = kPi * (1.0 + std::sin(gamma));
  g.axis = Eigen::Vector3d(std::sin(2 * alpha) * std::cos(beta), std::sin(2 * alpha) * std::sin(beta),
                           std::cos(2 * alpha));
  g.predicted = herm_expm(pauli_dot(g.axis), g.rotation_angle / 2.0);
  const EvolutionRecord rec = propagate(g.schedule, 512);
  g.propagated = rec.final_propagator();
  g.gate = g.propagated.topLeftCorner(2, 2);
  g.report = check_holonomic_conditions(rec, basis_projector(3, {0, 1}), tol);
  return g;
}

MultiPulseGate multi_pulse_gate(double theta, double phi, const std::vector<MultiPulseSegment>& segments,
                                const ToleranceConfig& tol) {
  if (segments.empty()) throw ConfigError("multi-pulse gate needs at least one segment");
  const cplx w0 = std::sin(theta / 2) * std::exp(kI * phi);
  const cplx w1 = -std::cos(theta / 2);
  Vec b(3), e(3), d(3);
  b << std::conj(w0), std::conj(w1), 0.0;
  e << 0.0, 0.0, 1.0;
  d << -w1, w0, 0.0;
  MultiPulseGate g;
  Mat u = identity(3);
  bool frames = false;
  std::vector<std::pair<double, Mat>> pieces;
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const MultiPulseSegment& seg = segments[j];
    if (seg.area <= 0.0) throw PulseShapeError("segment area must be positive");
    if (seg.frame.size()) {
      if (seg.frame.rows() != 3 || !is_unitary(seg.frame)) throw UnitarityError("frame change must be a 3x3 unitary");
      if (std::abs(std::abs(e.dot(seg.frame * e)) - 1.0) > tol.frame)
        throw FrameError("frame change moves the excited direction");
      frames = frames || !seg.frame.isIdentity(1e-14);
      u = seg.frame * u;
      b = seg.frame * b;
      d = seg.frame * d;
      e = seg.frame * e;
    }
    const Mat h = std::exp(-kI * seg.eta) * outer(e, b) + std::exp(kI * seg.eta) * outer(b, e);
    if ((h * d).norm() > tol.frame) throw SegmentChainError("segment does not preserve the dark state");
    const Mat us = herm_expm(h, seg.area);
    u = us * u;
    b = us * b;
    e = us * e;
    pieces.push_back({seg.area, h});
  }
  if (std::abs(std::abs(e(2)) - 1.0) > tol.cyclicity)
    throw SegmentChainError("final segment does not return to the computational subspace");
  g.propagated = u;
  g.gate = u.topLeftCorner(2, 2);
  g.schedule = hermitian_schedule(pieces);
  if (!frames) g.report = check_holonomic_conditions(propagate(g.schedule, 64), basis_projector(3, {0, 1}), tol);
  return g;
}

// ---------------------------------------------------------------------------
// Four-level

void four_level_svd(const Mat& s, Mat& u_l, double& alpha, double& beta, Mat& u_r) {
  if (s.rows() != 2 || s.cols() != 2) throw DimensionError("coupling block must be 2x2");
  const double scale = std::max(s.norm(), 1e-300);
  if (std::abs(s.determinant()) < 1e-12 * scale * scale)
    throw ReducibleError("det S = 0: the scheme reduces to a Lambda system");
  Eigen::JacobiSVD<Mat> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  alpha = svd.singularValues()(0);
  beta = svd.singularValues()(1);
  if (alpha - beta < 1e-12 * scale) {
    // Degenerate singular values: S / alpha is unitary; take U_l = I.
    u_l = identity(2);
    u_r = (s / alpha).adjoint();
    alpha = beta = 0.5 * (alpha + beta);
    return;
  }
  u_l = svd.matrixU();
  u_r = svd.matrixV();
  // Fix column phases: first nonzero entry of each U_l column real positive.
  for (int k = 0; k < 2; ++k) {
    const int r = std::abs(u_l(0, k)) > 1e-12 ? 0 : 1;
    const cplx ph = std::conj(u_l(r, k)) / std::abs(u_l(r, k));
    u_l.col(k) *= ph;
    u_r.col(k) *= ph;
  }
}

FourLevelGate four_level_gate(const Mat& s, FourLevelMode mode, double area, double tol) {
  FourLevelGate g;
  four_level_svd(s, g.u_l, g.alpha, g.beta, g.u_r);
  if (area <= 0.0) {
    const double r = g.alpha / g.beta;
    const auto [p, q] = best_rational(r, 64);
    if (std::abs(r - double(p) / double(q)) > tol * r) {
      std::ostringstream os;
      os << "singular value ratio " << r << " has no rational approximation with denominator <= 64";
      throw CommensurabilityError(os.str());
    }
    if (mode == FourLevelMode::BlockDiagonal) {
      if ((p % 2 == 1) == (q % 2 == 1)) throw CommensurabilityError("block-diagonal mode needs a ratio of mixed parity");
      area = double(q) * kPi / g.beta;
    } else {
      if (p % 2 == 0 || q % 2 == 0) throw CommensurabilityError("swap mode needs an odd/odd ratio");
      area = double(q) * kPi / (2.0 * g.beta);
    }
  }
  g.area = area;
  const double ca = std::cos(area * g.alpha), cb = std::cos(area * g.beta);
  const double sa = std::sin(area * g.alpha), sb = std::sin(area * g.beta);
  if (mode == FourLevelMode::BlockDiagonal) {
    if (std::abs(sa) > tol || std::abs(sb) > tol)
      throw CommensurabilityError("sin(a D) does not vanish at the requested area");
  } else if (std::abs(ca) > tol || std::abs(cb) > tol) {
    throw CommensurabilityError("cos(a D) does not vanish at the requested area");
  }
  Mat h = Mat::Zero(4, 4);
  h.topRightCorner(2, 2) = s;
  h.bottomLeftCorner(2, 2) = s.adjoint();
  g.propagated = herm_expm(h, area);
  Mat c = Mat::Zero(2, 2), sn = Mat::Zero(2, 2);
  c(0, 0) = ca;
  c(1, 1) = cb;
  sn(0, 0) = sa;
  sn(1, 1) = sb;
  g.predicted = Mat(4, 4);
  g.predicted.topLeftCorner(2, 2) = g.u_l * c * g.u_l.adjoint();
  g.predicted.topRightCorner(2, 2) = -kI * g.u_l * sn * g.u_r.adjoint();
  g.predicted.bottomLeftCorner(2, 2) = -kI * g.u_r * sn * g.u_l.adjoint();
  g.predicted.bottomRightCorner(2, 2) = g.u_r * c * g.u_r.adjoint();
  g.u0 = g.propagated.topLeftCorner(2, 2);
  g.u1 = g.propagated.bottomRightCorner(2, 2);
  g.off_block_norm = std::hypot(g.propagated.topRightCorner(2, 2).norm(), g.propagated.bottomLeftCorner(2, 2).norm());
  g.diag_block_norm = std::hypot(g.u0.norm(), g.u1.norm());
  return g;
}

// ---------------------------------------------------------------------------
// XY auxiliary

XyAuxGate xy_aux_single_gate(double theta, double beta, const ToleranceConfig& tol, long max_multiple) {
  XyAuxGate g;
  const double c2 = std::pow(std::cos(theta / 2), 2);
  const double s2 = std::pow(std::sin(theta / 2), 2);
  if (c2 < 1e-14) throw CommensurabilityError("theta = pi leaves no cyclic time for the auxiliary");
  const double x = s2 / c2;
  const auto [p, q] = best_rational(x, 64);
  if (std::abs(x - double(p) / double(q)) <= 1e-12 * std::max(1.0, x)) {
    if (p % 2 != 0 || q % 2 == 0) {
      std::ostringstream os;
      os << "tan^2(theta/2) = " << p << "/" << q << " admits no time with cos(aD) = diag(-1, 1)";
      throw CommensurabilityError(os.str());
    }
    g.exact = true;
    g.odd_multiple = q;
    g.even_multiple = p;
  } else {
    const double bound = std::asin(std::min(1.0, std::sqrt(tol.leakage)));
    for (long n = 1; n <= max_multiple; n += 2) {
      const double nx = double(n) * x;
      const double m = 2.0 * std::round(nx / 2.0);
      if (kPi * std::abs(nx - m) < bound) {
        g.odd_multiple = n;
        g.even_multiple = long(m);
        break;
      }
    }
    if (g.odd_multiple == 0) {
      std::ostringstream os;
      os << "no odd multiple up to " << max_multiple << " brings the auxiliary back within leakage "
         << tol.leakage;
      throw CommensurabilityError(os.str());
    }
  }
  g.area = double(g.odd_multiple) * kPi / c2;
  g.phase_error = std::abs(g.area * s2 - double(g.even_multiple) * kPi);

  const Mat sx = pauli_x(), sy = pauli_y(), i2 = identity(2);
  const Mat h = 0.5 * std::sin(theta) * kron(std::cos(beta) * sx + std::sin(beta) * sy, i2) +
                0.5 * std::cos(theta) * (kron(sx, sx) + kron(sy, sy));
  g.full = herm_expm(h, g.area);
  g.gate = g.full.topLeftCorner(2, 2);
  g.predicted = std::cos(theta) * pauli_z() - std::sin(theta) * (std::cos(beta) * sx + std::sin(beta) * sy);
  g.leakage = std::pow(op_norm(g.full.bottomLeftCorner(2, 2)), 2);
  if (g.leakage > tol.leakage) {
    std::ostringstream os;
    os << "auxiliary leakage " << g.leakage << " exceeds " << tol.leakage;
    throw LeakageError(os.str());
  }
  return g;
}

XyAuxTwoQubit xy_aux_two_qubit_gate(double theta, double omega, const ToleranceConfig& tol) {
  if (omega <= 0.0) throw ConfigError("omega must be positive");
  XyAuxTwoQubit g;
  g.j13 = omega * std::cos(theta / 2);
  g.j23 = omega * std::sin(theta / 2);
  g.tau = kPi / omega;
  const Mat sx = pauli_x(), sy = pauli_y();
  auto xy = [&](int a, int b) {
    return Mat(0.5 * (kron_all({a == 0 || b == 0 ? sx : identity(2), a == 1 || b == 1 ? sx : identity(2),
                                a == 2 || b == 2 ? sx : identity(2)}) +
                      kron_all({a == 0 || b == 0 ? sy : identity(2), a == 1 || b == 1 ? sy : identity(2),
                                a == 2 || b == 2 ? sy : identity(2)})));
  };
  g.h = g.j13 * xy(0, 2) + g.j23 * xy(1, 2);
  g.full = herm_expm(g.h, g.tau);
  const std::vector<int> targets = {0, 2, 4, 6};  // auxiliary (rightmost) in |0>
  g.gate = block(g.full, targets);
  g.v2_block = block(g.full, {1, 2, 4});
  g.predicted = Mat::Zero(4, 4);
  g.predicted(0, 0) = 1.0;
  g.predicted(1, 1) = std::cos(theta);
  g.predicted(1, 2) = -std::sin(theta);
  g.predicted(2, 1) = -std::sin(theta);
  g.predicted(2, 2) = -std::cos(theta);
  g.predicted(3, 3) = -1.0;
  Mat leak(4, 4);
  const std::vector<int> flipped = {1, 3, 5, 7};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) leak(r, c) = g.full(flipped[r], targets[c]);
  g.leakage = std::pow(op_norm(leak), 2);
  if (g.leakage > tol.leakage) {
    std::ostringstream os;
    os << "auxiliary leakage " << g.leakage << " exceeds " << tol.leakage;
    throw LeakageError(os.str());
  }
  return g;
}

// ---------------------------------------------------------------------------
// Tripod

TripodLoop octant_loop(int samples) {
  TripodLoop l;
  l.samples = samples;
  l.path = [](double s) -> std::pair<double, double> {
    const double h = kPi / 2;
    if (s <= 1.0 / 3) return {h * 3 * s, 0.0};
    if (s <= 2.0 / 3) return {h, h * (3 * s - 1)};
    return {h * (3 - 3 * s), h};
  };
  return l;
}

TripodLoop cap_loop(double theta0, int samples) {
  TripodLoop l;
  l.samples = samples;
  l.path = [theta0](double s) -> std::pair<double, double> {
    if (s <= 1.0 / 3) return {theta0 * 3 * s, 0.0};
    if (s <= 2.0 / 3) return {theta0, 2 * kPi * (3 * s - 1)};
    return {theta0 * (3 - 3 * s), 2 * kPi};
  };
  return l;
}

Mat tripod_hamiltonian_z(double theta, double phi, double omega) {
  Mat h = Mat::Zero(4, 4);
  h(3, 1) = -omega * std::sin(theta / 2) * std::exp(kI * phi);
  h(3, 2) = omega * std::cos(theta / 2);
  return h + Mat(h.adjoint());
}

Mat tripod_hamiltonian_y(double theta, double phi, double omega) {
  Mat h = Mat::Zero(4, 4);
  h(3, 0) = omega * std::sin(theta) * std::cos(phi);
  h(3, 1) = omega * std::sin(theta) * std::sin(phi);
  h(3, 2) = omega * std::cos(theta);
  return h + Mat(h.adjoint());
}

Mat tripod_pair_hamiltonian(double theta, double phi, double omega) {
  Mat h = Mat::Zero(3, 3);
  h(2, 0) = -omega * std::sin(theta / 2) * std::exp(kI * phi);
  h(2, 1) = omega * std::cos(theta / 2);
  return h + Mat(h.adjoint());
}

TripodGates tripod_gates(const TripodLoop& loop, const ToleranceConfig& tol) {
  if (!loop.path) throw ConfigError("tripod loop has no path");
  const auto start = loop.path(0.0), end = loop.path(1.0);
  if (std::abs(start.first) > 1e-12 || std::abs(end.first) > 1e-12)
    throw ConfigError("tripod loop must be based at theta = 0");
  TripodGates g;
  for (int k = 0; k < loop.samples; ++k) {
    const auto a = loop.path(double(k) / loop.samples), b = loop.path(double(k + 1) / loop.samples);
    g.solid_angle += (1.0 - std::cos(0.5 * (a.first + b.first))) * (b.second - a.second);
  }
  auto make = [&](const std::function<Mat(double, double)>& hf) {
    ParameterLoop pl;
    pl.samples = loop.samples;
    const auto path = loop.path;
    pl.sampler = [hf, path](double s) {
      const auto [th, ph] = path(s);
      return hf(th, ph);
    };
    return pl;
  };
  auto qubit_holonomy = [&](const ParameterLoop& pl) {
    Eigen::SelfAdjointEigenSolver<Mat> es(pl.sampler(0.0));
    const Mat v0 = es.eigenvectors().middleCols(1, 2);
    const Mat hol = wilczek_zee_holonomy(pl, 1, 2, tol);
    // The band at theta = 0 is Span{|0>, |1>}; express the holonomy there.
    return Mat((v0 * hol * v0.adjoint()).topLeftCorner(2, 2));
  };
  g.u_z = qubit_holonomy(make([](double th, double ph) { return tripod_hamiltonian_z(th, ph); }));
  g.phi1 = std::arg(g.u_z(1, 1) / g.u_z(0, 0));
  g.u_y = qubit_holonomy(make([](double th, double ph) { return tripod_hamiltonian_y(th, ph); }));
  g.phi2 = std::atan2(g.u_y(0, 1).real(), g.u_y(0, 0).real());
  g.phi3 = berry_phase_loop(make([](double th, double ph) { return tripod_pair_hamiltonian(th, ph); }), 1, tol);
  g.conditional = identity(4);
  g.conditional(3, 3) = std::exp(kI * g.phi3);
  return g;
}

// ---------------------------------------------------------------------------
// Reverse engineering

std::function<Mat(std::size_t, double)> schedule_frame(const ControlSchedule& schedule, int substeps) {
  schedule.validate();
  std::vector<Mat> starts;
  Mat u = identity(schedule.dim());
  for (std::size_t j = 0; j < schedule.segments.size(); ++j) {
    starts.push_back(u);
    ControlSchedule one = schedule;
    one.segments = {schedule.segments[j]};
    u = propagate(one, schedule.segments[j].shape ? substeps : 1).final_propagator() * u;
  }
  return [schedule, starts, substeps](std::size_t j, double s) {
    const Segment& seg = schedule.segments.at(j);
    if (!seg.shape) return Mat(herm_expm(schedule.hamiltonian(j, 0.0), s) * starts[j]);
    ControlSchedule part = schedule;
    Segment piece = seg;
    piece.duration = s;
    part.segments = {piece};
    if (s <= 0.0) return starts[j];
    const int n = std::max(1, int(std::ceil(substeps * s / seg.duration)));
    return Mat(propagate(part, n).final_propagator() * starts[j]);
  };
}

ReverseEngineered reverse_engineer_hamiltonian(const PathSpec& path, int probe_samples) {
  if (!path.frame) throw ConfigError("path has no frame");
  if (path.durations.empty()) throw ConfigError("path has no segments");
  const Mat f0 = path.frame(0, 0.0);
  const int dim = int(f0.rows());
  const int m = int(f0.cols());
  if (path.mode == PathMode::NonAbelian) {
    if (path.auxiliary_count < 1 || m + path.auxiliary_count != dim)
      throw FrameError("non-Abelian paths need frame columns + auxiliary_count = dim with at least one auxiliary");
  } else if (m != dim) {
    throw FrameError("Abelian paths need a complete frame");
  }
  ReverseEngineered out;
  // Orthonormality on a probe grid.
  for (std::size_t j = 0; j < path.durations.size(); ++j)
    for (int k = 0; k <= probe_samples; ++k) {
      const Mat f = path.frame(j, path.durations[j] * k / probe_samples);
      out.frame_residual = std::max(out.frame_residual, (f.adjoint() * f - identity(m)).norm());
    }
  if (out.frame_residual > 1e-8) {
    std::ostringstream os;
    os << "path frame is not orthonormal (residual " << out.frame_residual << ")";
    throw FrameError(os.str());
  }
  const PathMode mode = path.mode;
  const auto frame = path.frame;
  auto raw = [frame, mode, dim](std::size_t j, double s, double d) {
    const Mat f = frame(j, s);
    const Mat df = derivative([&](double x) { return frame(j, x); }, s, d);
    Mat h = kI * df * f.adjoint();
    if (mode == PathMode::DynamicalFree) {
      const Mat a = f.adjoint() * df;
      h -= kI * f * Mat(a.diagonal().asDiagonal()) * f.adjoint();
    } else if (mode == PathMode::NonAbelian) {
      auto proj = [&](double x) {
        const Mat g = frame(j, x);
        return Mat(identity(dim) - g * g.adjoint());
      };
      h += kI * derivative(proj, s, d) * proj(s);
    }
    return h;
  };
  for (std::size_t j = 0; j < path.durations.size(); ++j)
    for (int k = 0; k <= probe_samples; ++k) {
      const Mat h = raw(j, path.durations[j] * k / probe_samples, path.durations[j]);
      out.hermiticity_residual = std::max(out.hermiticity_residual, (h - h.adjoint()).norm());
    }
  out.schedule.basis = hermitian_basis(dim);
  for (std::size_t j = 0; j < path.durations.size(); ++j) {
    Segment seg;
    seg.duration = path.durations[j];
    const double d = seg.duration;
    seg.shape = [raw, j, d](double s) {
      const Mat h = raw(j, s, d);
      return hermitian_coordinates(0.5 * (h + h.adjoint()));
    };
    seg.coeffs = seg.shape(0.0);
    out.schedule.segments.push_back(seg);
  }
  return out;
}

namespace {

struct Clusters {
  std::vector<double> energies;
  std::vector<Mat> projectors;
};

Clusters cluster_spectrum(const Mat& h, const ToleranceConfig& tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const RVec& e = es.eigenvalues();
  const double scale = std::max(e.cwiseAbs().maxCoeff(), 1e-300);
  const double merge = std::max(tol.degeneracy_spread, 1e-10) * scale;
  Clusters c;
  int start = 0;
  for (int k = 1; k <= int(e.size()); ++k) {
    if (k == int(e.size()) || e(k) - e(k - 1) > merge) {
      const Mat v = es.eigenvectors().middleCols(start, k - start);
      c.energies.push_back(e.segment(start, k - start).mean());
      c.projectors.push_back(v * v.adjoint());
      if (k < int(e.size()) && e(k) - e(k - 1) < tol.degeneracy_gap * scale)
        throw DegeneracyError("level crossing along the counterdiabatic loop");
      start = k;
    }
  }
  return c;
}

Mat cd_term(const ControlSchedule& h0, std::size_t j, double s, const ToleranceConfig& tol, std::size_t expected) {
  const Clusters c = cluster_spectrum(h0.hamiltonian(j, s), tol);
  if (expected && c.energies.size() != expected)
    throw DegeneracyError("degeneracy pattern changes along the loop");
  const double d = h0.segments[j].duration;
  const Mat dh = h0.segments[j].shape ? derivative([&](double x) { return h0.hamiltonian(j, x); }, s, d)
                                      : Mat(Mat::Zero(h0.dim(), h0.dim()));
  Mat ha = Mat::Zero(h0.dim(), h0.dim());
  for (std::size_t p = 0; p < c.energies.size(); ++p)
    for (std::size_t q = 0; q < c.energies.size(); ++q)
      if (p != q) ha += kI * c.projectors[p] * dh * c.projectors[q] / (c.energies[q] - c.energies[p]);
  return 0.5 * (ha + ha.adjoint());
}

}  // namespace

Mat counterdiabatic_term(const ControlSchedule& h0, double t, const ToleranceConfig& tol) {
  h0.validate();
  double acc = 0.0;
  for (std::size_t j = 0; j < h0.segments.size(); ++j) {
    const double d = h0.segments[j].duration;
    if (t < acc + d || j + 1 == h0.segments.size()) return cd_term(h0, j, std::clamp(t - acc, 0.0, d), tol, 0);
    acc += d;
  }
  return Mat::Zero(h0.dim(), h0.dim());
}

ControlSchedule sta_counterdiabatic(const ControlSchedule& h0, const ToleranceConfig& tol) {
  h0.validate();
  const std::size_t pattern = cluster_spectrum(h0.hamiltonian(0, 0.0), tol).energies.size();
  ControlSchedule out;
  const int dim = h0.dim();
  out.basis = hermitian_basis(dim);
  for (std::size_t j = 0; j < h0.segments.size(); ++j) {
    Segment seg;
    seg.duration = h0.segments[j].duration;
    seg.shape = [h0, j, tol, pattern](double s) {
      return hermitian_coordinates(h0.hamiltonian(j, s) + cd_term(h0, j, s, tol, pattern));
    };
    seg.coeffs = seg.shape(0.0);
    out.segments.push_back(seg);
  }
  return out;
}

}  // namespace hforge
