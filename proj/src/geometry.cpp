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

#include "hforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hforge {

namespace {

// Eigen-decomposition with the gap/degeneracy checks shared by the loop
// routines. Returns eigenvectors of the band [band, band + L).
Mat band_vectors(const Mat& h, int band, int l, const ToleranceConfig& tol) {
  if (!is_hermitian(h, 1e-10)) throw HermiticityError("loop sampler returned a non-Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const RVec& e = es.eigenvalues();
  const int dim = int(h.rows());
  if (band < 0 || band + l > dim) throw DimensionError("band index out of range");
  const double scale = std::max(e.cwiseAbs().maxCoeff(), 1e-300);
  const double spread = e(band + l - 1) - e(band);
  if (spread > tol.degeneracy_spread * scale) {
    std::ostringstream os;
    os << "intra-band spread " << spread << " exceeds " << tol.degeneracy_spread << " * ||H||";
    throw DegeneracyError(os.str());
  }
  if (band > 0 && e(band) - e(band - 1) < tol.degeneracy_gap * scale)
    throw DegeneracyError("gap below the band is closed");
  if (band + l < dim && e(band + l) - e(band + l - 1) < tol.degeneracy_gap * scale)
    throw DegeneracyError("gap above the band is closed");
  return es.eigenvectors().middleCols(band, l);
}

void require_closed(const ParameterLoop& loop) {
  if (!loop.sampler) throw ConfigError("parameter loop has no sampler");
  if (loop.samples < 2) throw ConfigError("parameter loop needs at least two samples");
  if (!loop.closed) throw NotCyclicError("parameter loop is declared open");
  const double r = (loop.sampler(1.0) - loop.sampler(0.0)).norm();
  if (r > 1e-10) {
    std::ostringstream os;
    os << "closure residual " << r << " exceeds 1e-10";
    throw NotCyclicError(os.str());
  }
}

}  // namespace

PhaseDecomposition decompose_phase(const EvolutionRecord& record, const Vec& psi0, bool strict,
                                   double cyclicity_tol) {
  const std::size_t n = record.grid.size();
  if (n < 2) throw ConfigError("decompose_phase: record has fewer than two samples");
  if (record.hamiltonians.size() != n) throw ConfigError("decompose_phase: record lacks per-sample H");
  if (psi0.size() != record.dim()) throw DimensionError("decompose_phase: ket dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw ConfigError("decompose_phase: initial ket not normalized");

  std::vector<Vec> psi(n);
  for (std::size_t j = 0; j < n; ++j) psi[j] = record.propagators[j] * psi0;

  double unwound = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::arg(psi0.dot(psi[j]));
    if (j == 0) {
      unwound = a;
    } else {
      unwound += wrap_angle(a - prev);
    }
    prev = a;
  }

  double dyn = 0.0;
  const bool steps = record.step_hamiltonians.size() + 1 == n;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double dt = record.grid[j + 1] - record.grid[j];
    if (steps) {
      const Mat& h = record.step_hamiltonians[j];
      dyn -= 0.5 * dt * (expectation(psi[j], h).real() + expectation(psi[j + 1], h).real());
    } else {
      dyn -= 0.5 * dt *
             (expectation(psi[j], record.hamiltonians[j]).real() +
              expectation(psi[j + 1], record.hamiltonians[j + 1]).real());
    }
  }

  PhaseDecomposition out;
  out.total = unwound;
  out.dynamical = dyn;
  out.geometric = out.total - out.dynamical;
  out.total_principal = wrap_angle(out.total);
  out.geometric_principal = wrap_angle(out.geometric);
  out.cyclicity_residual = std::clamp(1.0 - std::abs(psi0.dot(psi.back())), 0.0, 1.0);
  if (strict && out.cyclicity_residual > cyclicity_tol) {
    std::ostringstream os;
    os << "cyclicity residual " << out.cyclicity_residual << " exceeds " << cyclicity_tol;
    throw NotCyclicError(os.str());
  }
  return out;
}

double wilson_loop_phase(const std::vector<Vec>& states) {
  const std::size_t n = states.size();
  if (n < 2) throw ConfigError("wilson_loop_phase: need at least two states");
  const Eigen::Index dim = states.front().size();
  Eigen::Index gauge = -1;
  for (Eigen::Index c = 0; c < dim && gauge < 0; ++c) {
    double lo = 1.0;
    for (const auto& v : states) lo = std::min(lo, std::abs(v(c)));
    if (lo > 1e-6) gauge = c;
  }
  if (gauge < 0) {
    cplx prod = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      prod *= states[j].dot(states[(j + 1) % n]);
      prod /= std::max(std::abs(prod), 1e-300);
    }
    return -std::arg(prod);
  }
  auto fixed = [&](std::size_t j) {
    const Vec& v = states[j % n];
    const cplx z = v(gauge);
    return Vec(v * (std::conj(z) / std::abs(z)));
  };
  double phase = 0.0;
  Vec cur = fixed(0);
  for (std::size_t j = 0; j < n; ++j) {
    Vec nxt = fixed(j + 1);
    phase -= std::arg(cur.dot(nxt));
    cur = std::move(nxt);
  }
  return phase;
}

double berry_phase_loop(const ParameterLoop& loop, int band, const ToleranceConfig& tol) {
  require_closed(loop);
  std::vector<Vec> states(std::size_t(loop.samples));
  for (int j = 0; j < loop.samples; ++j)
    states[std::size_t(j)] = band_vectors(loop.sampler(double(j) / loop.samples), band, 1, tol).col(0);
  return wilson_loop_phase(states);
}

SolidAngle solid_angle_prediction(double theta) {
  const double omega = 2.0 * kPi * (1.0 - std::cos(theta));
  return {omega, -0.5 * omega, 0.5 * omega};
}

Mat wilczek_zee_holonomy(const ParameterLoop& loop, int band, int degeneracy, const ToleranceConfig& tol) {
  require_closed(loop);
  if (degeneracy < 1) throw ConfigError("degeneracy must be >= 1");
  const Mat v0 = band_vectors(loop.sampler(0.0), band, degeneracy, tol);
  Mat f = v0;
  for (int j = 1; j <= loop.samples; ++j) {
    const Mat v = (j == loop.samples) ? v0 : band_vectors(loop.sampler(double(j) / loop.samples), band, degeneracy, tol);
    const Mat w = polar_unitary(f.adjoint() * v);
    f = v * w.adjoint();
  }
  return v0.adjoint() * f;
}

MovingFrame frame_from_function(const std::function<Mat(double)>& fn, double total_time, int steps,
                                bool single_valued) {
  MovingFrame fr;
  fr.single_valued = single_valued;
  for (int j = 0; j <= steps; ++j) {
    const double t = total_time * double(j) / steps;
    fr.grid.push_back(t);
    fr.vectors.push_back(fn(t));
  }
  return fr;
}

HolonomyReport anandan_decomposition(const MovingFrame& frame, const EvolutionRecord& record,
                                     const ToleranceConfig& tol) {
  const std::size_t n = frame.grid.size();
  if (n < 2 || record.grid.size() != n || frame.vectors.size() != n)
    throw FrameError("frame and record grids differ in length");
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(frame.grid[j] - record.grid[j]) > 1e-12 * std::max(1.0, std::abs(record.grid[j])))
      throw FrameError("frame and record grids differ");
  const int l = frame.rank();
  const int dim = record.dim();
  const Mat& f0 = frame.vectors.front();
  if (f0.rows() != dim) throw DimensionError("frame dimension differs from record");

  HolonomyReport rep;
  const Mat p0 = f0 * f0.adjoint();
  for (std::size_t j = 0; j < n; ++j) {
    const Mat& f = frame.vectors[j];
    const double gram = (f.adjoint() * f - identity(l)).norm();
    if (gram > 1e-10) throw FrameError("frame is not orthonormal");
    const Mat& u = record.propagators[j];
    const double r = (f * f.adjoint() - u * p0 * u.adjoint()).norm();
    rep.frame_residual = std::max(rep.frame_residual, r);
  }
  if (rep.frame_residual > tol.frame) {
    std::ostringstream os;
    os << "frame does not span the propagated subspace (residual " << rep.frame_residual << ")";
    throw FrameError(os.str());
  }
  if (frame.single_valued && (frame.vectors.back() - f0).norm() > 1e-8)
    throw FrameError("frame declared single-valued but endpoints differ");

  rep.A_samples.resize(n);
  rep.K_samples.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t a = (j == 0) ? 0 : j - 1;
    const std::size_t b = (j + 1 == n) ? j : j + 1;
    const Mat fd = (frame.vectors[b] - frame.vectors[a]) / (frame.grid[b] - frame.grid[a]);
    Mat amat = kI * frame.vectors[j].adjoint() * fd;
    rep.A_samples[j] = 0.5 * (amat + amat.adjoint());
    Mat kmat = frame.vectors[j].adjoint() * record.hamiltonians[j] * frame.vectors[j];
    rep.K_samples[j] = 0.5 * (kmat + kmat.adjoint());
    rep.max_K_norm = std::max(rep.max_K_norm, rep.K_samples[j].norm());
  }
  Mat c = identity(l);
  Mat g = identity(l);
  // Transport through polar overlaps with a symmetric split for K; this is
  // exactly covariant under sample-wise gauge changes of the frame.
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double dt = frame.grid[j + 1] - frame.grid[j];
    const Mat m = polar_unitary(frame.vectors[j + 1].adjoint() * frame.vectors[j]);
    c = herm_expm(rep.K_samples[j + 1], 0.5 * dt) * m * herm_expm(rep.K_samples[j], 0.5 * dt) * c;
    g = m * g;
  }
  const Mat overlap = f0.adjoint() * frame.vectors.back();
  rep.holonomy = overlap * c;
  rep.geometric_holonomy = overlap * g;
  const Mat fT = frame.vectors.back();
  rep.cyclicity_residual = (fT * fT.adjoint() - p0).norm();
  rep.purely_geometric = rep.max_K_norm < tol.holonomy;
  return rep;
}

HolonomyReport check_holonomic_conditions(const EvolutionRecord& record, const Mat& p0,
                                          const ToleranceConfig& tol, bool relaxed) {
  require_projector(p0);
  if (p0.rows() != record.dim()) throw DimensionError("projector dimension differs from record");
  const Mat basis = projector_basis(p0);
  const int l = int(basis.cols());
  HolonomyReport rep;
  const Mat& ut = record.final_propagator();
  rep.cyclicity_residual = (ut * p0 * ut.adjoint() - p0).norm();

  auto block = [&](const Mat& u, const Mat& h) {
    Mat k = basis.adjoint() * u.adjoint() * h * u * basis;
    k = 0.5 * (k + k.adjoint());
    if (relaxed) k -= (k.trace() / double(l)) * identity(l);
    return k;
  };
  const bool steps = record.step_hamiltonians.size() + 1 == record.grid.size();
  if (steps) {
    for (std::size_t j = 0; j < record.step_hamiltonians.size(); ++j) {
      Mat k = block(record.propagators[j], record.step_hamiltonians[j]);
      rep.max_K_norm = std::max(rep.max_K_norm, k.norm());
      rep.K_samples.push_back(std::move(k));
    }
  } else {
    for (std::size_t j = 0; j < record.grid.size(); ++j) {
      Mat k = block(record.propagators[j], record.hamiltonians[j]);
      rep.max_K_norm = std::max(rep.max_K_norm, k.norm());
      rep.K_samples.push_back(std::move(k));
    }
  }
  // In the propagated frame the connection coincides with K.
  rep.A_samples = rep.K_samples;
  rep.holonomy = basis.adjoint() * ut * basis;
  rep.geometric_holonomy = rep.holonomy;
  rep.purely_geometric = rep.max_K_norm < tol.holonomy && rep.cyclicity_residual < tol.cyclicity;
  return rep;
}

MovingFrame gauge_transform(const MovingFrame& frame, const std::vector<Mat>& omega, double unitarity_tol) {
  if (omega.size() != frame.vectors.size()) throw DimensionError("gauge field length differs from frame");
  MovingFrame out = frame;
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (omega[j].rows() != frame.rank() || !is_unitary(omega[j], unitarity_tol))
      throw UnitarityError("gauge matrix is not unitary of the frame rank");
    out.vectors[j] = frame.vectors[j] * omega[j];
  }
  out.single_valued = frame.single_valued && (omega.back() - omega.front()).norm() < 1e-12;
  return out;
}

}  // namespace hforge
