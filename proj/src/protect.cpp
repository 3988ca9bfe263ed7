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

#include "hforge/protect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hforge {

namespace {

Mat pauli(char axis) {
  switch (axis) {
    case 'x':
      return pauli_x();
    case 'y':
      return pauli_y();
    case 'z':
      return pauli_z();
    default:
      throw ConfigError(std::string("unknown axis '") + axis + "'");
  }
}

Mat all_qubits(char axis, int n) {
  std::vector<Mat> ops(n, pauli(axis));
  return kron_all(ops);
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<Mat> collective_error_ops(int n, const std::string& axes) {
  if (n < 1) throw ConfigError("collective operators need at least one qubit");
  std::vector<Mat> out;
  for (char a : axes) {
    const int dim = 1 << n;
    Mat s = Mat::Zero(dim, dim);
    for (int k = 0; k < n; ++k) s += embed(pauli(a), k, n);
    out.push_back(0.5 * s);
  }
  return out;
}

NsDecomposition ns_dimensions(int n) {
  if (n < 1 || n > 60) throw ConfigError("ns_dimensions supports 1 <= N <= 60");
  NsDecomposition d;
  d.n_qubits = n;
  unsigned long long total = 0;
  for (int tj = n % 2; tj <= n; tj += 2) {
    NsSector s;
    s.twice_j = tj;
    s.d = tj + 1;
    // n_J = (2J + 1) N! / ((N/2 + J + 1)! (N/2 - J)!) = (2J + 1) C(N, N/2 - J) / (N/2 + J + 1)
    const int k = (n - tj) / 2;
    s.n = (tj + 1) * binomial(n, k) / ((n + tj) / 2 + 1);
    total += static_cast<unsigned long long>(s.n * s.d);
    d.sectors.push_back(s);
  }
  if (total != (1ULL << n)) throw DimensionError("noiseless-subsystem decomposition is incomplete");
  return d;
}

namespace {

// Spin-J states built by coupling qubits one at a time (|0> = spin up).
struct Coupled {
  std::vector<int> path;     // 2j after each qubit
  std::vector<Vec> m_states; // index i <-> 2M = 2j - 2i
};

std::vector<Coupled> couple_qubits(int n) {
  std::vector<Coupled> cur(1);
  cur[0].path = {1};
  cur[0].m_states = {basis_ket(2, 0), basis_ket(2, 1)};
  for (int q = 1; q < n; ++q) {
    std::vector<Coupled> next;
    for (const Coupled& c : cur) {
      const int tj1 = c.path.back();
      const double j1 = 0.5 * tj1;
      for (int tj : {tj1 - 1, tj1 + 1}) {
        if (tj < 0) continue;
        Coupled nc;
        nc.path = c.path;
        nc.path.push_back(tj);
        const int dim = 1 << (q + 1);
        for (int i = 0; i <= tj; ++i) {
          const double m = 0.5 * (tj - 2 * i);
          Vec v = Vec::Zero(dim);
          double cu, cd;
          if (tj == tj1 + 1) {
            cu = std::sqrt((j1 + m + 0.5) / (2 * j1 + 1));
            cd = std::sqrt((j1 - m + 0.5) / (2 * j1 + 1));
          } else {
            cu = -std::sqrt((j1 - m + 0.5) / (2 * j1 + 1));
            cd = std::sqrt((j1 + m + 0.5) / (2 * j1 + 1));
          }
          auto old = [&](double mm) -> const Vec* {
            const int idx = int(std::lround(j1 - mm));
            if (std::abs(mm) > j1 + 1e-12) return nullptr;
            return &c.m_states[idx];
          };
          if (auto p = old(m - 0.5)) v += cu * kron(Mat(*p), Mat(basis_ket(2, 0))).col(0);
          if (auto p = old(m + 0.5)) v += cd * kron(Mat(*p), Mat(basis_ket(2, 1))).col(0);
          nc.m_states.push_back(v);
        }
        next.push_back(nc);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

Mat ns4_j1_basis() {
  std::vector<Coupled> all = couple_qubits(4);
  std::vector<Coupled> j1;
  for (auto& c : all)
    if (c.path.back() == 2) j1.push_back(c);
  std::sort(j1.begin(), j1.end(), [](const Coupled& a, const Coupled& b) { return a.path < b.path; });
  Mat b(16, 9);
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m) b.col(3 * k + m) = j1[k].m_states[m];
  return b;
}

Mat qubit_permutation(const std::vector<int>& perm) {
  const int n = int(perm.size());
  std::vector<int> check(perm);
  std::sort(check.begin(), check.end());
  for (int k = 0; k < n; ++k)
    if (check[k] != k) throw ConfigError("not a permutation");
  const int dim = 1 << n;
  Mat p = Mat::Zero(dim, dim);
  for (int in = 0; in < dim; ++in) {
    int out = 0;
    for (int k = 0; k < n; ++k) {
      const int bit = (in >> (n - 1 - k)) & 1;
      out |= bit << (n - 1 - perm[k]);
    }
    p(out, in) = 1.0;
  }
  return p;
}

NsLogicalOperator ns4_logical_operator(const Mat& logical) {
  if (logical.rows() != 3 || logical.cols() != 3) throw DimensionError("logical operator must be 3x3");
  NsLogicalOperator out;
  const Mat b = ns4_j1_basis();
  out.matrix = b * kron(logical, identity(3)) * b.adjoint();
  std::array<int, 4> p = {0, 1, 2, 3};
  Mat a(256, 24);
  int col = 0;
  do {
    out.perms.push_back(p);
    const Mat pm = qubit_permutation(std::vector<int>(p.begin(), p.end()));
    a.col(col++) = Eigen::Map<const Vec>(pm.data(), 256);
  } while (std::next_permutation(p.begin(), p.end()));
  const Vec target = Eigen::Map<const Vec>(out.matrix.data(), 256);
  const Vec c = a.completeOrthogonalDecomposition().solve(target);
  out.coefficients.assign(c.data(), c.data() + c.size());
  out.residual = (a * c - target).norm();
  return out;
}

// ---------------------------------------------------------------------------

Mat DfsCode::isometry(bool with_auxiliary) const {
  const int cols = int(logical_basis.size() + (with_auxiliary ? auxiliary_basis.size() : 0));
  Mat v(1 << physical_qubits, cols);
  int c = 0;
  for (const Vec& x : logical_basis) v.col(c++) = x;
  if (with_auxiliary)
    for (const Vec& x : auxiliary_basis) v.col(c++) = x;
  return v;
}

DfsCode make_dfs_code(const std::string& name) {
  DfsCode c;
  c.name = name;
  auto ket = [&](int idx) { return basis_ket(1 << c.physical_qubits, idx); };
  if (name == "DFS2") {
    c.physical_qubits = 2;
    c.logical_basis = {ket(0b01), ket(0b10)};
  } else if (name == "DFS3") {
    c.physical_qubits = 3;
    c.logical_basis = {ket(0b010), ket(0b001)};
    c.auxiliary_basis = {ket(0b100)};
  } else if (name == "DFS4") {
    c.physical_qubits = 4;
    c.logical_basis = {ket(0b0001), ket(0b0010)};
    c.auxiliary_basis = {ket(0b0100), ket(0b1000)};
  } else {
    throw ConfigError("unknown code '" + name + "' (expected DFS2, DFS3, DFS4)");
  }
  return c;
}

Vec dfs_encode(const DfsCode& code, const Vec& logical) {
  const std::size_t nl = code.logical_basis.size();
  const std::size_t na = code.auxiliary_basis.size();
  if (std::size_t(logical.size()) == nl) return code.isometry(false) * logical;
  if (std::size_t(logical.size()) == nl + na) return code.isometry(true) * logical;
  std::ostringstream os;
  os << code.name << " expects " << nl << " (or " << nl + na << ") logical amplitudes, got " << logical.size();
  throw DimensionError(os.str());
}

ControlSchedule dfs_logical_lambda(const DfsCode& code, cplx w0, cplx w1, double duration) {
  if (code.physical_qubits != 3 || code.logical_basis.size() != 2 || code.auxiliary_basis.size() != 1)
    throw DimensionError("logical Lambda needs a DFS3 register");
  if (duration <= 0.0) throw PulseShapeError("duration must be positive");
  const Mat sx = pauli_x(), sy = pauli_y();
  auto pair = [&](const Mat& a, int i, const Mat& b, int j) { return Mat(embed(a, i, 3) * embed(b, j, 3)); };
  auto sym = [&](int i, int j) { return Mat(0.5 * (pair(sx, i, sx, j) + pair(sy, i, sy, j))); };
  auto anti = [&](int i, int j) { return Mat(0.5 * (pair(sx, i, sy, j) - pair(sy, i, sx, j))); };
  ControlSchedule s;
  // Qubit order (Qa, Q2, Q1); anti(i, j) = i|01><10| + h.c. on the pair.
  s.basis = {sym(0, 1), anti(0, 1), sym(0, 2), anti(0, 2)};
  Segment seg;
  seg.duration = duration;
  seg.coeffs = RVec(4);
  seg.coeffs << w0.real(), -w0.imag(), w1.real(), -w1.imag();
  s.segments.push_back(seg);
  return s;
}

double logical_process_fidelity(const Mat& u, const Mat& isometry, const Mat& target, int env_dim, int env_state) {
  const int ds = int(isometry.rows());
  const int d = int(isometry.cols());
  if (u.rows() != ds * env_dim || u.cols() != ds * env_dim)
    throw DimensionError("unitary does not match system x environment dimensions");
  if (target.rows() != d || target.cols() != d) throw DimensionError("target does not match the logical dimension");
  const Vec e0 = basis_ket(env_dim, env_state);
  const Mat in = kron(isometry, Mat(e0));
  double f = 0.0;
  for (int k = 0; k < env_dim; ++k) {
    const Mat out = kron(isometry, Mat(basis_ket(env_dim, k)));
    const Mat kraus = out.adjoint() * u * in;
    f += std::norm((target.adjoint() * kraus).trace());
  }
  return f / double(d * d);
}

// ---------------------------------------------------------------------------

Mat DdModel::h_int() const {
  const int ds = 1 << system_qubits;
  Mat h = Mat::Zero(ds * env_dim(), ds * env_dim());
  for (const LinearCoupling& c : couplings) {
    if (c.qubit < 0 || c.qubit >= system_qubits) throw ModelError("coupling refers to a missing qubit");
    if (c.env_op.rows() != env_dim() || c.env_op.cols() != env_dim())
      throw DimensionError("environment operator has the wrong dimension");
    h += kron(embed(pauli(c.axis), c.qubit, system_qubits), c.env_op);
  }
  return h;
}

Mat DdModel::h_free() const { return kron(identity(1 << system_qubits), h_env) + h_int(); }

DdModel dd_model_from_matrix(int system_qubits, const Mat& h_env, const Mat& h_int, double tol) {
  const int ds = 1 << system_qubits;
  const int de = int(h_env.rows());
  if (h_int.rows() != ds * de || h_int.cols() != ds * de) throw DimensionError("interaction has the wrong dimension");
  DdModel m;
  m.system_qubits = system_qubits;
  m.h_env = h_env;
  const Mat paulis[4] = {identity(2), pauli_x(), pauli_y(), pauli_z()};
  const char axes[4] = {'0', 'x', 'y', 'z'};
  const int strings = 1 << (2 * system_qubits);
  const double scale = std::max(h_int.norm(), 1.0);
  for (int code = 0; code < strings; ++code) {
    std::vector<Mat> ops;
    int weight = 0, site = -1, which = 0;
    for (int k = 0; k < system_qubits; ++k) {
      const int p = (code >> (2 * (system_qubits - 1 - k))) & 3;
      ops.push_back(paulis[p]);
      if (p) {
        ++weight;
        site = k;
        which = p;
      }
    }
    const Mat ps = kron_all(ops);
    // E_P = tr_sys[(P (x) I) H] / 2^n
    Mat e = Mat::Zero(de, de);
    for (int a = 0; a < ds; ++a)
      for (int b = 0; b < ds; ++b)
        if (ps(b, a) != cplx(0.0)) e += ps(b, a) * h_int.block(a * de, b * de, de, de);
    e /= double(ds);
    if (e.norm() <= tol * scale) continue;
    if (weight == 0) {
      m.h_env += e;
    } else if (weight == 1) {
      m.couplings.push_back({site, axes[which], e});
    } else {
      throw ModelError("interaction contains multi-qubit system terms; only the linear form is supported");
    }
  }
  return m;
}

DdResult dd_sequence(DdKind kind, double tau, int cycles, const DdModel& model, double pulse_width) {
  if (tau <= 0.0 || cycles < 1) throw ConfigError("tau must be positive and cycles >= 1");
  if (pulse_width < 0.0) throw PulseShapeError("pulse width must be non-negative");
  if (model.h_env.size() == 0) throw ModelError("environment Hamiltonian is required (use a 1x1 zero for none)");
  if (kind == DdKind::X)
    for (const LinearCoupling& c : model.couplings)
      if (c.axis == 'x') throw ModelError("sigma_x coupling commutes with the X decoupling pulse");
  const int n = model.system_qubits;
  const int de = model.env_dim();
  const Mat ie = identity(de);
  const Mat h = model.h_free();
  const Mat u_tau = herm_expm(h, tau);
  auto pulse = [&](char axis) {
    if (pulse_width == 0.0) return Mat(kron(all_qubits(axis, n), ie));
    Mat gen = Mat::Zero(1 << n, 1 << n);
    for (int k = 0; k < n; ++k) gen += embed(pauli(axis), k, n);
    return Mat(herm_expm(kron(gen, ie) * (kPi / (2.0 * pulse_width)) + h, pulse_width));
  };
  const std::vector<char> pulses = kind == DdKind::X ? std::vector<char>{'x', 'x'}
                                                     : std::vector<char>{'x', 'y', 'x', 'y'};
  Mat cycle = identity(h.rows());
  std::vector<Mat> toggled;
  Mat frame = identity(h.rows());
  for (char a : pulses) {
    toggled.push_back(frame.adjoint() * h * frame);
    const Mat p = pulse(a);
    cycle = p * u_tau * cycle;
    frame = kron(all_qubits(a, n), ie) * frame;
  }
  DdResult r;
  r.evolution = identity(h.rows());
  for (int c = 0; c < cycles; ++c) r.evolution = cycle * r.evolution;
  r.total_time = double(cycles) * double(pulses.size()) * tau;

  auto max_phase = [](const Mat& w) {
    Eigen::ComplexEigenSolver<Mat> es(w);
    const cplx tr = w.trace();
    const cplx ref = std::abs(tr) > 1e-12 ? tr / std::abs(tr) : cplx(1.0);
    double m = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      m = std::max(m, std::abs(std::arg(es.eigenvalues()(k) * std::conj(ref))));
    return m;
  };
  const Mat he = kron(identity(1 << n), model.h_env);
  r.residual = max_phase(r.evolution * herm_expm(he, -r.total_time));
  Mat s2 = Mat::Zero(h.rows(), h.cols());
  for (std::size_t i = 0; i < toggled.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) s2 += toggled[i] * toggled[j] - toggled[j] * toggled[i];
  // log W ~ -(tau^2 / 2) sum_{i > j} [H_i, H_j]; i times that is Hermitian.
  const Mat herm = kI * (-0.5 * tau * tau * double(cycles)) * s2;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (herm + herm.adjoint()));
  r.second_order = es.eigenvalues().cwiseAbs().maxCoeff();
  return r;
}

// ---------------------------------------------------------------------------

namespace {

double unit_interval(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double NoiseParameter::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Distribution::None:
      return 0.0;
    case Distribution::Fixed:
      return scale;
    case Distribution::Uniform:
      return scale * (2.0 * unit_interval(rng) - 1.0);
    case Distribution::Gaussian: {
      const double u1 = 1.0 - unit_interval(rng);  // (0, 1]
      const double u2 = unit_interval(rng);
      return scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
  }
  return 0.0;
}

void NoiseParameter::validate() const {
  if (!std::isfinite(scale)) throw ConfigError("noise scale must be finite");
  if ((kind == Distribution::Uniform || kind == Distribution::Gaussian) && scale < 0.0)
    throw ConfigError("noise width must be non-negative");
}

void NoiseModel::validate(int dim) const {
  if (error_ops.size() != error_params.size()) throw ConfigError("each error operator needs a distribution");
  amplitude.validate();
  for (std::size_t l = 0; l < error_ops.size(); ++l) {
    error_params[l].validate();
    if (error_ops[l].rows() != dim || error_ops[l].cols() != dim)
      throw DimensionError("noise operator does not match the schedule dimension");
    if (!is_hermitian(error_ops[l])) throw HermiticityError("noise operator is not Hermitian");
  }
}

NoiseSample draw_noise(const NoiseModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NoiseSample s;
  s.amplitude = model.amplitude.sample(rng);
  for (const NoiseParameter& p : model.error_params) s.deltas.push_back(p.sample(rng));
  return s;
}

ControlSchedule apply_noise(const ControlSchedule& schedule, const NoiseModel& model, const NoiseSample& sample) {
  schedule.validate();
  model.validate(schedule.dim());
  if (sample.deltas.size() != model.error_ops.size()) throw DimensionError("noise sample does not match the model");
  ControlSchedule out = schedule;
  const int d = schedule.dim();
  Mat drift = schedule.drift.size() ? schedule.drift : Mat(Mat::Zero(d, d));
  bool touched = schedule.drift.size() > 0;
  for (std::size_t l = 0; l < model.error_ops.size(); ++l)
    if (sample.deltas[l] != 0.0) {
      drift += sample.deltas[l] * model.error_ops[l];
      touched = true;
    }
  if (touched) out.drift = drift;
  if (sample.amplitude != 0.0) {
    const double f = 1.0 + sample.amplitude;
    for (Segment& seg : out.segments) {
      seg.coeffs *= f;
      if (seg.shape) seg.shape = [g = seg.shape, f](double s) { return RVec(f * g(s)); };
    }
  }
  return out;
}

ControlSchedule noise_inject(const ControlSchedule& schedule, const NoiseModel& model, std::uint64_t seed) {
  return apply_noise(schedule, model, draw_noise(model, seed));
}

Quadrature gauss_hermite(int n, double sigma) {
  if (n < 1) throw ConfigError("quadrature needs at least one node");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Quadrature q;
  for (int k = 0; k < n; ++k) {
    q.nodes.push_back(sigma * es.eigenvalues()(k));
    q.weights.push_back(es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
  }
  return q;
}

Quadrature uniform_midpoint(int n, double half_width) {
  if (n < 1) throw ConfigError("quadrature needs at least one node");
  Quadrature q;
  for (int k = 0; k < n; ++k) {
    q.nodes.push_back(-half_width + (2.0 * k + 1.0) * half_width / n);
    q.weights.push_back(1.0 / n);
  }
  return q;
}

Quadrature quadrature_for(const NoiseParameter& p, int n) {
  p.validate();
  switch (p.kind) {
    case Distribution::None:
      return {{0.0}, {1.0}};
    case Distribution::Fixed:
      return {{p.scale}, {1.0}};
    case Distribution::Uniform:
      return p.scale == 0.0 ? Quadrature{{0.0}, {1.0}} : uniform_midpoint(n, p.scale);
    case Distribution::Gaussian:
      return p.scale == 0.0 ? Quadrature{{0.0}, {1.0}} : gauss_hermite(n, p.scale);
  }
  return {{0.0}, {1.0}};
}

}  // namespace hforge
