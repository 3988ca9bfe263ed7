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

#include "hforge/qcore.hpp"

#include <cmath>
#include <sstream>

namespace hforge {

bool ToleranceConfig::set(const std::string& key, double value) {
  for (auto& [name, ptr] : std::initializer_list<std::pair<const char*, double*>>{
           {"unitarity", &unitarity},
           {"hermiticity", &hermiticity},
           {"cyclicity", &cyclicity},
           {"holonomy", &holonomy},
           {"degeneracy_spread", &degeneracy_spread},
           {"degeneracy_gap", &degeneracy_gap},
           {"frame", &frame},
           {"leakage", &leakage}}) {
    if (key == name) {
      *ptr = value;
      return true;
    }
  }
  return false;
}

std::vector<std::pair<std::string, double>> ToleranceConfig::items() const {
  return {{"unitarity", unitarity},
          {"hermiticity", hermiticity},
          {"cyclicity", cyclicity},
          {"holonomy", holonomy},
          {"degeneracy_spread", degeneracy_spread},
          {"degeneracy_gap", degeneracy_gap},
          {"frame", frame},
          {"leakage", leakage}};
}

const ToleranceConfig& default_tolerances() {
  static const ToleranceConfig cfg{};
  return cfg;
}

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat identity(int dim) { return Mat::Identity(dim, dim); }

Vec basis_ket(int dim, int k) {
  if (k < 0 || k >= dim) throw DimensionError("basis index out of range");
  Vec v = Vec::Zero(dim);
  v(k) = 1.0;
  return v;
}

Mat pauli_dot(const Eigen::Vector3d& n) {
  return n(0) * pauli_x() + n(1) * pauli_y() + n(2) * pauli_z();
}

Mat outer(const Vec& a, const Vec& b) { return a * b.adjoint(); }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat kron_all(const std::vector<Mat>& ops) {
  if (ops.empty()) return identity(1);
  Mat out = ops.front();
  for (std::size_t k = 1; k < ops.size(); ++k) out = kron(out, ops[k]);
  return out;
}

Mat embed(const Mat& op, int site, int n_sites) {
  if (site < 0 || site >= n_sites) throw DimensionError("site out of range");
  const int d = int(op.rows());
  std::vector<Mat> ops(n_sites, identity(d));
  ops[site] = op;
  return kron_all(ops);
}

cplx expectation(const Vec& psi, const Mat& op) {
  if (op.rows() != psi.size() || op.cols() != psi.size())
    throw DimensionError("expectation: operator and ket dimensions differ");
  return psi.dot(op * psi);
}

bool is_hermitian(const Mat& h, double rel_tol) {
  if (h.rows() != h.cols()) return false;
  return (h - h.adjoint()).norm() <= rel_tol * h.norm();
}

double unitarity_residual(const Mat& u) {
  return (u.adjoint() * u - identity(int(u.cols()))).norm();
}

bool is_unitary(const Mat& u, double tol) {
  return u.rows() == u.cols() && unitarity_residual(u) <= tol;
}

double spectral_scale(const Mat& h) {
  if (h.size() == 0) return 0.0;
  if (is_hermitian(h, 1e-10)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return h.norm();
}

Mat herm_expm(const Mat& h, double t) {
  if (h.rows() != h.cols()) throw DimensionError("herm_expm: matrix is not square");
  if (!is_hermitian(h, default_tolerances().hermiticity)) {
    std::ostringstream os;
    os << "||H - H^dag||_F = " << (h - h.adjoint()).norm() << " exceeds tolerance";
    throw HermiticityError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const Mat& v = es.eigenvectors();
  Vec phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
  return v * phases.asDiagonal() * v.adjoint();
}

cplx best_phase(const Mat& a, const Mat& b) {
  const cplx ov = (b.adjoint() * a).trace();
  if (std::abs(ov) < 1e-300) return 1.0;
  return ov / std::abs(ov);
}

double phase_aligned_distance(const Mat& a, const Mat& b) {
  return (a - best_phase(a, b) * b).norm();
}

void require_projector(const Mat& p, double tol) {
  if (p.rows() != p.cols()) throw ProjectorError("projector is not square");
  if ((p - p.adjoint()).norm() > tol) throw ProjectorError("projector is not Hermitian");
  if ((p * p - p).norm() > tol) throw ProjectorError("projector is not idempotent");
}

double gate_fidelity(const Mat& u, const Mat& v, const Mat& p) {
  if (u.rows() != v.rows() || u.rows() != p.rows() || u.cols() != p.cols())
    throw DimensionError("gate_fidelity: dimension mismatch");
  require_projector(p);
  const double l = p.trace().real();
  if (l < 0.5) throw ProjectorError("projector has zero rank");
  const cplx tr = (v.adjoint() * u * p).trace();
  return std::norm(tr) / (l * l);
}

Mat projector_basis(const Mat& p) {
  require_projector(p);
  const int dim = int(p.rows());
  Mat offdiag = p;
  offdiag.diagonal().setZero();
  if (offdiag.norm() < 1e-12) {
    std::vector<int> idx;
    for (int k = 0; k < dim; ++k)
      if (p(k, k).real() > 0.5) idx.push_back(k);
    Mat b = Mat::Zero(dim, Eigen::Index(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) b(idx[c], Eigen::Index(c)) = 1.0;
    return b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.adjoint()));
  std::vector<int> idx;
  for (int k = 0; k < dim; ++k)
    if (es.eigenvalues()(k) > 0.5) idx.push_back(k);
  Mat b(dim, Eigen::Index(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) b.col(Eigen::Index(c)) = es.eigenvectors().col(idx[c]);
  return b;
}

Mat basis_projector(int dim, const std::vector<int>& states) {
  Mat p = Mat::Zero(dim, dim);
  for (int k : states) {
    if (k < 0 || k >= dim) throw DimensionError("basis_projector: index out of range");
    p(k, k) = 1.0;
  }
  return p;
}

Mat polar_unitary(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

std::vector<Mat> hermitian_basis(int dim) {
  std::vector<Mat> out;
  out.reserve(std::size_t(dim) * std::size_t(dim));
  for (int k = 0; k < dim; ++k) {
    Mat e = Mat::Zero(dim, dim);
    e(k, k) = 1.0;
    out.push_back(e);
  }
  for (int k = 0; k < dim; ++k)
    for (int l = k + 1; l < dim; ++l) {
      Mat x = Mat::Zero(dim, dim);
      x(k, l) = 1.0;
      x(l, k) = 1.0;
      Mat y = Mat::Zero(dim, dim);
      y(k, l) = kI;
      y(l, k) = -kI;
      out.push_back(x);
      out.push_back(y);
    }
  return out;
}

RVec hermitian_coordinates(const Mat& h) {
  const int dim = int(h.rows());
  RVec c(dim * dim);
  int i = 0;
  for (int k = 0; k < dim; ++k) c(i++) = h(k, k).real();
  for (int k = 0; k < dim; ++k)
    for (int l = k + 1; l < dim; ++l) {
      const cplx v = 0.5 * (h(k, l) + std::conj(h(l, k)));
      c(i++) = v.real();
      c(i++) = v.imag();
    }
  return c;
}

// ---------------------------------------------------------------------------

int ControlSchedule::dim() const {
  if (!basis.empty()) return int(basis.front().rows());
  if (drift.size() > 0) return int(drift.rows());
  return 0;
}

double ControlSchedule::total_time() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void ControlSchedule::validate() const {
  const int d = dim();
  if (d == 0) throw DimensionError("schedule has neither basis nor drift");
  for (const auto& b : basis)
    if (b.rows() != d || b.cols() != d) throw DimensionError("basis operators differ in dimension");
  if (drift.size() > 0 && (drift.rows() != d || drift.cols() != d))
    throw DimensionError("drift dimension differs from basis");
  for (const auto& s : segments) {
    if (!(s.duration > 0.0)) throw ConfigError("segment duration must be positive");
    if (!s.shape && s.coeffs.size() != Eigen::Index(basis.size()))
      throw DimensionError("coefficient vector length differs from basis length");
  }
}

Mat ControlSchedule::hamiltonian(std::size_t j, double s) const {
  const int d = dim();
  Mat h = drift.size() > 0 ? drift : Mat::Zero(d, d);
  const Segment& seg = segments.at(j);
  const RVec c = seg.shape ? seg.shape(s) : seg.coeffs;
  if (c.size() != Eigen::Index(basis.size()))
    throw DimensionError("coefficient vector length differs from basis length");
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (c(Eigen::Index(k)) != 0.0) h += c(Eigen::Index(k)) * basis[k];
  return h;
}

Mat ControlSchedule::hamiltonian_at(double t) const {
  double t0 = 0.0;
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const double d = segments[j].duration;
    if (t < t0 + d || j + 1 == segments.size()) return hamiltonian(j, std::min(t - t0, d));
    t0 += d;
  }
  throw ConfigError("empty schedule");
}

void ControlSchedule::append(const ControlSchedule& other) {
  if (other.basis.size() != basis.size()) throw DimensionError("append: basis mismatch");
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
}

ControlSchedule ControlSchedule::reversed() const {
  ControlSchedule out = *this;
  out.segments.assign(segments.rbegin(), segments.rend());
  for (auto& s : out.segments)
    if (s.shape) {
      auto f = s.shape;
      const double d = s.duration;
      s.shape = [f, d](double x) { return f(d - x); };
    }
  return out;
}

ControlSchedule constant_schedule(const Mat& h, double duration) {
  ControlSchedule s;
  s.basis = {h};
  Segment seg;
  seg.duration = duration;
  seg.coeffs = RVec::Ones(1);
  s.segments.push_back(seg);
  return s;
}

EvolutionRecord propagate(const ControlSchedule& schedule, int substeps_per_segment) {
  schedule.validate();
  if (substeps_per_segment < 1) throw ConfigError("substeps_per_segment must be >= 1");
  const int d = schedule.dim();
  EvolutionRecord rec;
  Mat u = identity(d);
  double t = 0.0;
  rec.grid.push_back(0.0);
  rec.propagators.push_back(u);
  rec.hamiltonians.push_back(schedule.segments.empty() ? Mat::Zero(d, d) : schedule.hamiltonian(0, 0.0));
  for (std::size_t j = 0; j < schedule.segments.size(); ++j) {
    const Segment& seg = schedule.segments[j];
    const double dt = seg.duration / substeps_per_segment;
    const bool constant = !seg.shape;
    Mat hc, uc;
    if (constant) {
      hc = schedule.hamiltonian(j, 0.0);
      uc = herm_expm(hc, dt);
    }
    for (int m = 0; m < substeps_per_segment; ++m) {
      Mat h = constant ? hc : schedule.hamiltonian(j, (m + 0.5) * dt);
      u = (constant ? uc : herm_expm(h, dt)) * u;
      t += dt;
      const bool last = (m + 1 == substeps_per_segment);
      rec.grid.push_back(t);
      rec.propagators.push_back(u);
      rec.step_hamiltonians.push_back(h);
      if (constant) {
        rec.hamiltonians.push_back(hc);
      } else if (last && j + 1 < schedule.segments.size()) {
        rec.hamiltonians.push_back(schedule.hamiltonian(j + 1, 0.0));
      } else {
        rec.hamiltonians.push_back(schedule.hamiltonian(j, (m + 1) * dt));
      }
    }
    if (constant && j + 1 < schedule.segments.size()) rec.hamiltonians.back() = schedule.hamiltonian(j + 1, 0.0);
  }
  return rec;
}

EvolutionRecord sample_evolution(double total_time, int steps,
                                 const std::function<Mat(double)>& propagator,
                                 const std::function<Mat(double)>& hamiltonian) {
  if (steps < 1) throw ConfigError("sample_evolution: steps must be >= 1");
  EvolutionRecord rec;
  for (int j = 0; j <= steps; ++j) {
    const double t = total_time * double(j) / steps;
    rec.grid.push_back(t);
    rec.propagators.push_back(propagator(t));
    rec.hamiltonians.push_back(hamiltonian(t));
  }
  return rec;
}

EvolutionRecord chain(const EvolutionRecord& first, const EvolutionRecord& second) {
  if (first.dim() != second.dim()) throw DimensionError("chain: dimension mismatch");
  EvolutionRecord out = first;
  const double t1 = first.total_time();
  const Mat& u1 = first.final_propagator();
  const bool steps = !first.step_hamiltonians.empty() && !second.step_hamiltonians.empty();
  if (!steps) out.step_hamiltonians.clear();
  for (std::size_t j = 1; j < second.grid.size(); ++j) {
    out.grid.push_back(t1 + second.grid[j]);
    out.propagators.push_back(second.propagators[j] * u1);
    out.hamiltonians.push_back(second.hamiltonians[j]);
  }
  if (steps)
    out.step_hamiltonians.insert(out.step_hamiltonians.end(), second.step_hamiltonians.begin(),
                                 second.step_hamiltonians.end());
  return out;
}

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double angle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace hforge
