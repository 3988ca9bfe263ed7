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

#include "hforge/gqc.hpp"

#include <cmath>
#include <sstream>

namespace hforge {

namespace {

Mat rot(const Mat& pauli, double angle) { return herm_expm(0.5 * pauli, angle); }

Mat diag2(cplx a, cplx b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Composite Simpson rule on [0, T] with an even number of panels.
double simpson(const std::function<double(double)>& f, double total, int panels) {
  if (panels % 2) ++panels;
  const double h = total / panels;
  double s = f(0.0) + f(total);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return s * h / 3.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spin in a rotating field

Mat spin_field_hamiltonian(const SpinFieldParams& p, double t) {
  const double ph = p.omega * t + p.phi0;
  const Eigen::Vector3d b(p.mu_b0 * std::sin(p.theta) * std::cos(ph) + p.residual_coupling,
                          p.mu_b0 * std::sin(p.theta) * std::sin(ph), p.mu_b0 * std::cos(p.theta));
  return pauli_dot(b);
}

ControlSchedule spin_field_schedule(const SpinFieldParams& p, double total_time) {
  if (p.mu_b0 <= 0.0) throw ConfigError("mu_b0 must be positive");
  if (p.theta < 0.0 || p.theta > kPi) throw ConfigError("theta must lie in [0, pi]");
  ControlSchedule s;
  s.basis = {pauli_x(), pauli_y(), pauli_z()};
  Segment seg;
  seg.duration = total_time;
  auto coeffs = [p](double t) {
    const double ph = p.omega * t + p.phi0;
    RVec c(3);
    c << p.mu_b0 * std::sin(p.theta) * std::cos(ph) + p.residual_coupling, p.mu_b0 * std::sin(p.theta) * std::sin(ph),
        p.mu_b0 * std::cos(p.theta);
    return c;
  };
  seg.coeffs = coeffs(0.0);
  seg.shape = coeffs;
  s.segments.push_back(seg);
  return s;
}

Vec spin_field_eigenstate(const SpinFieldParams& p, double t, bool plus) {
  const double ph = p.omega * t + p.phi0;
  const cplx e = std::exp(kI * ph);
  Vec v(2);
  if (plus)
    v << std::cos(p.theta / 2), e * std::sin(p.theta / 2);
  else
    v << std::sin(p.theta / 2), -e * std::cos(p.theta / 2);
  return v;
}

ParameterLoop spin_field_loop(const SpinFieldParams& p, int samples) {
  SpinFieldParams q = p;
  q.omega = 2.0 * kPi;
  ParameterLoop loop;
  loop.samples = samples;
  loop.sampler = [q](double s) {
    // Exact closure at s = 1 despite rounding of the azimuth.
    return spin_field_hamiltonian(q, s >= 1.0 ? 0.0 : s);
  };
  return loop;
}

EvolutionRecord rotating_frame_record(const Mat& h0, const Mat& generator, double omega, double total_time, int steps,
                                      const Mat& frame) {
  if (h0.rows() != generator.rows()) throw DimensionError("rotating_frame_record: dimension mismatch");
  const int d = int(h0.rows());
  const Mat v = frame.size() ? frame : identity(d);
  if (!is_unitary(v)) throw UnitarityError("rotating_frame_record: frame is not unitary");
  const Mat h_rot = h0 - omega * generator;
  Eigen::SelfAdjointEigenSolver<Mat> eg(0.5 * (generator + generator.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat> er(0.5 * (h_rot + h_rot.adjoint()));
  auto ph = [](const Eigen::SelfAdjointEigenSolver<Mat>& es, double t) {
    Vec e(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < e.size(); ++k) e(k) = std::exp(-kI * es.eigenvalues()(k) * t);
    return Mat(es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint());
  };
  auto u_fn = [&](double t) { return Mat(v * ph(eg, omega * t) * ph(er, t) * v.adjoint()); };
  auto h_fn = [&](double t) {
    const Mat r = ph(eg, omega * t);
    return Mat(v * r * h0 * r.adjoint() * v.adjoint());
  };
  return sample_evolution(total_time, steps, u_fn, h_fn);
}

AaPrediction aa_closed_form(const SpinFieldParams& p) {
  AaPrediction a;
  a.theta_bar = std::atan2(2.0 * p.mu_b0 * std::sin(p.theta), 2.0 * p.mu_b0 * std::cos(p.theta) - p.omega);
  const double c = std::cos(a.theta_bar);
  // A negative rotation frequency traverses the cone the other way round.
  const double orient = p.omega < 0.0 ? -1.0 : 1.0;
  a.gamma_plus = -orient * kPi * (1.0 - c);
  a.gamma_minus = -orient * kPi * (1.0 + c);
  const cplx e = std::exp(kI * p.phi0);
  a.eta_plus = Vec(2);
  a.eta_plus << std::cos(a.theta_bar / 2), e * std::sin(a.theta_bar / 2);
  a.eta_minus = Vec(2);
  a.eta_minus << std::sin(a.theta_bar / 2), -e * std::cos(a.theta_bar / 2);
  return a;
}

EvolutionRecord aa_exact_record(const SpinFieldParams& p, int steps) {
  if (p.omega == 0.0) throw ConfigError("aa_exact_record: omega must be nonzero");
  if (p.residual_coupling != 0.0) throw ModelError("aa_exact_record: residual coupling breaks the rotating frame");
  const double period = 2.0 * kPi / std::abs(p.omega);
  return rotating_frame_record(spin_field_hamiltonian(p, 0.0), 0.5 * pauli_z(), p.omega, period, steps);
}

AdiabaticGate adiabatic_phase_gate(const SpinFieldParams& p, double total_time, double adiabatic_bound) {
  if (total_time <= 0.0) throw ConfigError("loop duration must be positive");
  SpinFieldParams q = p;
  q.omega = 2.0 * kPi / total_time;
  AdiabaticGate g;
  g.schedule = spin_field_schedule(q, total_time);
  const SolidAngle sa = solid_angle_prediction(p.theta);
  g.gamma_plus = sa.gamma_plus;
  g.gamma_minus = sa.gamma_minus;
  g.dynamical_plus = -p.mu_b0 * total_time;
  g.dynamical_minus = p.mu_b0 * total_time;
  g.gate = diag2(std::exp(kI * g.gamma_plus), std::exp(kI * g.gamma_minus));
  g.adiabaticity = q.omega / p.mu_b0;
  if (g.adiabaticity > adiabatic_bound) {
    g.adiabaticity_warning = true;
    std::ostringstream os;
    os << "adiabaticity ratio " << g.adiabaticity << " exceeds bound " << adiabatic_bound;
    g.warning = os.str();
  }
  return g;
}

EchoResult spin_echo_gate(const ControlSchedule& loop, const Mat& pi_pulse, EchoMode mode, const Mat& injected,
                          int samples) {
  loop.validate();
  if (loop.dim() != 2) throw DimensionError("spin_echo_gate tracks a two-level eigenpair");
  if (pi_pulse.rows() != 2 || pi_pulse.cols() != 2) throw DimensionError("pi pulse must be 2x2");
  if (!is_unitary(pi_pulse)) throw UnitarityError("pi pulse is not unitary");
  const Mat dmat = injected.size() ? injected : identity(2);
  if (dmat.rows() != 2 || !is_unitary(dmat)) throw UnitarityError("injected phase matrix must be a 2x2 unitary");

  EchoResult r;
  r.forward = loop;
  r.backward = loop.reversed();
  const double total = loop.total_time();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (loop.hamiltonian_at(0.0) + loop.hamiltonian_at(0.0).adjoint()));
  r.eigenbasis = Mat(2, 2);
  r.eigenbasis.col(0) = es.eigenvectors().col(1);
  r.eigenbasis.col(1) = es.eigenvectors().col(0);
  const Mat& e = r.eigenbasis;
  const Mat p_eig = e.adjoint() * pi_pulse * e;
  if (std::abs(p_eig(0, 0)) > 1e-8 || std::abs(p_eig(1, 1)) > 1e-8)
    throw SequenceError("pi pulse does not swap the tracked eigenpair");

  ParameterLoop pl;
  pl.samples = samples;
  pl.sampler = [&loop, total](double s) { return loop.hamiltonian_at(s >= 1.0 ? 0.0 : s * total); };
  // Closure of the schedule itself.
  if ((loop.hamiltonian_at(total) - loop.hamiltonian_at(0.0)).norm() > 1e-10)
    throw NotCyclicError("echo loop is not closed");
  r.gamma_plus = berry_phase_loop(pl, 1);
  r.gamma_minus = berry_phase_loop(pl, 0);

  Mat u_fwd, u_bwd;
  if (mode == EchoMode::Adiabatic) {
    auto energy = [&loop](double t, int band) {
      const Mat h = loop.hamiltonian_at(t);
      Eigen::SelfAdjointEigenSolver<Mat> s(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
      return s.eigenvalues()(band);
    };
    const double dp = -simpson([&](double t) { return energy(t, 1); }, total, samples);
    const double dm = -simpson([&](double t) { return energy(t, 0); }, total, samples);
    u_fwd = e * diag2(std::exp(kI * (r.gamma_plus + dp)), std::exp(kI * (r.gamma_minus + dm))) * e.adjoint();
    u_bwd = e * diag2(std::exp(kI * (-r.gamma_plus + dp)), std::exp(kI * (-r.gamma_minus + dm))) * e.adjoint();
  } else {
    const int sub = std::max(1, samples / int(loop.segments.size()));
    u_fwd = propagate(r.forward, sub).final_propagator();
    u_bwd = propagate(r.backward, sub).final_propagator();
  }
  const Mat inj = e * dmat * e.adjoint();
  r.total = pi_pulse * inj * u_bwd * pi_pulse * inj * u_fwd;
  r.gate = e.adjoint() * r.total * e;
  return r;
}

// ---------------------------------------------------------------------------
// NMR

Mat nmr_hamiltonian(const NmrParams& p, double t) {
  const double ph = p.omega * t + p.phi;
  return 0.5 * p.omega0 * pauli_z() + 0.5 * p.omega1 * (std::cos(ph) * pauli_x() + std::sin(ph) * pauli_y());
}

ConditionalGate conditional_adiabatic_gate(const NmrParams& p) {
  if (p.omega1 < 0.0) throw ConfigError("omega1 must be non-negative");
  const double d = p.omega0 - p.omega;
  auto term = [&](double x) {
    const double r = std::sqrt(x * x + p.omega1);
    if (r == 0.0) throw DivisionError("conditional gate: vanishing effective field");
    return x / r;
  };
  ConditionalGate g;
  g.delta_gamma = kPi * (term(d + p.J) - term(d - p.J));
  const cplx a = std::exp(2.0 * kI * g.delta_gamma);
  g.gate = Mat::Zero(4, 4);
  g.gate(0, 0) = a;
  g.gate(1, 1) = std::conj(a);
  g.gate(2, 2) = std::conj(a);
  g.gate(3, 3) = a;
  return g;
}

std::pair<cplx, double> makhlin_invariants(const Mat& u) {
  if (u.rows() != 4 || u.cols() != 4) throw DimensionError("makhlin_invariants expects a 4x4 unitary");
  Mat q(4, 4);
  const double s = 1.0 / std::sqrt(2.0);
  q << 1, 0, 0, kI, 0, kI, 1, 0, 0, kI, -1, 0, 1, 0, 0, -kI;
  q *= s;
  const Mat ub = q.adjoint() * u * q;
  const Mat m = ub.transpose() * ub;
  const cplx det = u.determinant();
  const cplx tr = m.trace();
  const cplx tr2 = (m * m).trace();
  const cplx g1 = tr * tr / (16.0 * det);
  const double g2 = ((tr * tr - tr2) / (4.0 * det)).real();
  return {g1, g2};
}

bool is_local_two_qubit(const Mat& u, double tol) {
  const auto [g1, g2] = makhlin_invariants(u);
  return std::abs(g1 - 1.0) < tol && std::abs(g2 - 3.0) < tol;
}

double dynamical_free_frequency(double omega0, double omega1) {
  if (omega0 == 0.0) throw DivisionError("dynamical_free_frequency: omega0 = 0");
  return -(omega0 * omega0 + omega1 * omega1) / omega0;
}

EvolutionRecord dynamical_free_record(double omega0, double omega1, int steps) {
  const double w = dynamical_free_frequency(omega0, omega1);
  const Mat h0 = 0.5 * (omega0 + w) * pauli_z() + 0.5 * omega1 * pauli_x();
  EvolutionRecord rec = rotating_frame_record(h0, 0.5 * pauli_z(), w, 2.0 * kPi / std::abs(w), steps);
  const double th = std::atan2(omega1, omega0);
  Vec psi(2);
  psi << std::cos(th / 2), std::sin(th / 2);
  rec.initial_states = {psi};
  return rec;
}

SSequence s_sequence(const NmrParams& p) {
  if (p.omega1 < 0.0) throw ConfigError("omega1 must be non-negative");
  SSequence s;
  const double d = p.omega0 - p.omega;
  s.delta_plus = d + p.J;
  s.delta_minus = d - p.J;
  if (p.omega1 == 0.0 && (s.delta_plus == 0.0 || s.delta_minus == 0.0))
    throw NoSolutionError("s_sequence: angle equations undefined for omega1 = 0 and zero detuning");
  const double a = std::atan2(s.delta_plus, p.omega1);
  const double b = std::atan2(s.delta_minus, p.omega1);
  if (p.J == 0.0) {
    if (std::abs(a - b) > 1e-14) throw NoSolutionError("s_sequence: J = 0 requires equal detunings");
    s.t_c = 0.0;
    s.phi_prime = a;
  } else {
    // Shift by whole turns so that sin(phi' +- J t_c) keeps the sign of d+-.
    double diff = a - b;
    if (p.J > 0.0 && diff < 0.0) diff += 2.0 * kPi;
    if (p.J < 0.0 && diff > 0.0) diff -= 2.0 * kPi;
    s.t_c = diff / (2.0 * p.J);
    s.phi_prime = a - p.J * s.t_c;
  }
  s.theta0 = 0.5 * kPi - p.J * s.t_c - s.phi_prime;
  s.theta1 = 0.5 * kPi + p.J * s.t_c - s.phi_prime;
  // [pi/2]^y, free precession at delta_+- for t_c, common z correction,
  // [pi/2]^x, [-phi']^y.
  auto branch = [&](double delta) {
    return Mat(rot(pauli_y(), -s.phi_prime) * rot(pauli_x(), kPi / 2) * rot(pauli_z(), -d * s.t_c) *
               rot(pauli_z(), delta * s.t_c) * rot(pauli_y(), kPi / 2));
  };
  s.u0 = branch(s.delta_plus);
  s.u1 = branch(s.delta_minus);
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  s.conditional = kron(s.u0, p0) + kron(s.u1, p1);
  return s;
}

// ---------------------------------------------------------------------------
// Two-loop cancellation

std::array<double, 2> two_loop_constraints(const TwoLoopParams& q, double gamma_over_pi) {
  const double r1 = std::hypot(q.omega0 - q.omega, q.omega1);
  const double r2 = std::hypot(q.omega0p + q.omega, q.omega1p);
  if (r1 == 0.0 || r2 == 0.0) throw DivisionError("two_loop_constraints: vanishing effective field");
  const double lhs = (q.omega0 * q.omega0 + q.omega1 * q.omega1 - q.omega0 * q.omega) / r1;
  const double rhs = (q.omega0p * q.omega0p + q.omega1p * q.omega1p + q.omega0p * q.omega) / r2;
  // Geometric condition in the form realized by the propagated loops: the
  // shared state sits at polar angles alpha and alpha' about z and z'.
  const double g = (q.omega0 - q.omega) / r1 + (q.omega0p + q.omega) / r2;
  return {lhs - rhs, std::remainder(g - gamma_over_pi, 2.0)};
}

TwoLoopResult two_loop_schedule(double gamma_over_pi, const TwoLoopParams& guess, int steps) {
  if (guess.omega == 0.0) throw ConfigError("two_loop_schedule: omega must be nonzero");
  TwoLoopResult r;
  TwoLoopParams q = guess;
  const double r1 = std::hypot(q.omega0 - q.omega, q.omega1);
  if (r1 == 0.0) throw ConstraintError("loop 1 has a vanishing effective field");
  const double lhs = (q.omega0 * q.omega0 + q.omega1 * q.omega1 - q.omega0 * q.omega) / r1;

  // Damped Newton on (omega0', omega1') from the supplied guess.
  auto f = [&](double a, double b) {
    TwoLoopParams t = q;
    t.omega0p = a;
    t.omega1p = b;
    return two_loop_constraints(t, gamma_over_pi);
  };
  auto norm = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };
  auto newton = [&](double a, double b, int& it) {
    for (it = 0; it < 100; ++it) {
      std::array<double, 2> fv;
      try {
        fv = f(a, b);
      } catch (const DivisionError&) {
        return std::array<double, 3>{a, b, 1e300};
      }
      if (norm(fv) < 1e-12) return std::array<double, 3>{a, b, norm(fv)};
      const double h = 1e-7 * std::max(1.0, std::abs(a) + std::abs(b));
      const auto fa = f(a + h, b), fa2 = f(a - h, b);
      const auto fb = f(a, b + h), fb2 = f(a, b - h);
      const double j00 = (fa[0] - fa2[0]) / (2 * h), j10 = (fa[1] - fa2[1]) / (2 * h);
      const double j01 = (fb[0] - fb2[0]) / (2 * h), j11 = (fb[1] - fb2[1]) / (2 * h);
      const double det = j00 * j11 - j01 * j10;
      if (std::abs(det) < 1e-300) break;
      const double da = (j11 * fv[0] - j01 * fv[1]) / det;
      const double db = (-j10 * fv[0] + j00 * fv[1]) / det;
      double lam = 1.0;
      bool moved = false;
      for (int k = 0; k < 40; ++k, lam *= 0.5) {
        try {
          if (norm(f(a - lam * da, b - lam * db)) < norm(fv)) {
            a -= lam * da;
            b -= lam * db;
            moved = true;
            break;
          }
        } catch (const DivisionError&) {
        }
      }
      if (!moved) break;
    }
    std::array<double, 2> fv{1e300, 1e300};
    try {
      fv = f(a, b);
    } catch (const DivisionError&) {
    }
    return std::array<double, 3>{a, b, norm(fv)};
  };
  int it = 0;
  auto sol = newton(q.omega0p, q.omega1p, it);
  r.iterations = it;
  if (sol[2] > 1e-10) {
    // Closed-form seed: cos(alpha') fixed by the geometric condition, the
    // radius r2 by the dynamical one.
    double c = gamma_over_pi - (q.omega0 - q.omega) / r1;
    c = std::remainder(c, 2.0);
    if (c < -1.0) c += 2.0;
    if (c > 1.0) c -= 2.0;
    const double r2 = lhs + q.omega * c;
    if (r2 <= 0.0) throw ConstraintError("two-loop constraints have no solution for these loop-1 parameters");
    int it2 = 0;
    sol = newton(r2 * c - q.omega, r2 * std::sqrt(std::max(0.0, 1.0 - c * c)), it2);
    r.iterations += it2;
  }
  if (sol[2] > 1e-10) {
    std::ostringstream os;
    os << "two-loop constraints unsatisfied (residual " << sol[2] << ")";
    throw ConstraintError(os.str());
  }
  q.omega0p = sol[0];
  q.omega1p = sol[1];
  r.params = q;
  r.constraint_residual = sol[2];
  r.alpha = std::atan2(q.omega1, q.omega0 - q.omega);
  r.alpha_p = std::atan2(q.omega1p, q.omega0p + q.omega);

  const double tau = 2.0 * kPi / std::abs(q.omega);
  const Mat gz = 0.5 * pauli_z();
  const Mat h1 = 0.5 * (q.omega1 * pauli_x() + q.omega0 * pauli_z());
  const Mat h2 = 0.5 * (q.omega1p * pauli_x() - q.omega0p * pauli_z());
  const Mat v = rot(pauli_y(), r.alpha + r.alpha_p);
  const EvolutionRecord rec1 = rotating_frame_record(h1, gz, q.omega, tau, steps);
  const EvolutionRecord rec2 = rotating_frame_record(h2, gz, q.omega, tau, steps, v);

  auto field = [](double w, double w1, double w0, double sign) {
    ControlSchedule s;
    s.basis = {pauli_x(), pauli_y(), pauli_z()};
    Segment seg;
    seg.duration = 2.0 * kPi / std::abs(w);
    seg.shape = [w, w1, w0, sign](double t) {
      RVec c(3);
      c << 0.5 * w1 * std::cos(w * t), 0.5 * w1 * std::sin(w * t), 0.5 * sign * w0;
      return c;
    };
    seg.coeffs = seg.shape(0.0);
    s.segments.push_back(seg);
    return s;
  };
  r.loop1 = field(q.omega, q.omega1, q.omega0, 1.0);
  // Loop 2 in the rotated frame: H = V H' V^dag, expressed in the Pauli basis.
  {
    ControlSchedule s = field(q.omega, q.omega1p, q.omega0p, -1.0);
    const auto inner = s.segments[0].shape;
    const Eigen::Matrix3d rmat = Eigen::AngleAxisd(r.alpha + r.alpha_p, Eigen::Vector3d::UnitY()).toRotationMatrix();
    s.segments[0].shape = [inner, rmat](double t) {
      const RVec c = inner(t);
      const Eigen::Vector3d w = rmat * Eigen::Vector3d(c(0), c(1), c(2));
      RVec o(3);
      o << w(0), w(1), w(2);
      return o;
    };
    s.segments[0].coeffs = s.segments[0].shape(0.0);
    r.loop2 = s;
  }

  Vec eta(2);
  eta << std::cos(r.alpha / 2), std::sin(r.alpha / 2);
  r.initial_state = eta;
  r.phases1 = decompose_phase(rec1, eta, true);
  r.phases2 = decompose_phase(rec2, eta, true);
  r.dynamical_sum = r.phases1.dynamical + r.phases2.dynamical;
  r.geometric_sum = r.phases1.geometric + r.phases2.geometric;
  r.gate = rec2.final_propagator() * rec1.final_propagator();
  return r;
}

// ---------------------------------------------------------------------------
// Orange slice

OrangeSlice orange_slice_gate(double gamma, double theta, double phi, const std::string& shape, double window) {
  if (shape != "square" && shape != "sin2") throw PulseShapeError("unknown pulse shape '" + shape + "'");
  if (window <= 0.0) throw PulseShapeError("window duration must be positive");
  OrangeSlice o;
  o.axis = Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  o.gate = herm_expm(pauli_dot(o.axis), -gamma);
  o.schedule.basis = {pauli_x(), pauli_y()};
  const double phases[3] = {phi - kPi / 2, gamma + phi + kPi / 2, phi - kPi / 2};
  const double areas[3] = {theta / 2, kPi / 2, (kPi - theta) / 2};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(areas[k]) < 1e-15) continue;
    Segment seg;
    seg.duration = window;
    const double c = std::cos(phases[k]), s = std::sin(phases[k]);
    if (shape == "square") {
      seg.coeffs = RVec(2);
      seg.coeffs << c * areas[k] / window, s * areas[k] / window;
    } else {
      const double amp = 2.0 * areas[k] / window;
      seg.shape = [amp, c, s, window](double t) {
        const double h = amp * std::pow(std::sin(kPi * t / window), 2);
        RVec v(2);
        v << c * h, s * h;
        return v;
      };
      seg.coeffs = seg.shape(0.0);
    }
    o.schedule.segments.push_back(seg);
  }
  return o;
}

// ---------------------------------------------------------------------------
// Unconventional phases

OscillatorPhases unconventional_oscillator_phases(double beta, double omega, double t) {
  if (omega == 0.0) throw DivisionError("modulation frequency must be nonzero");
  const double g = beta * beta * (omega * t - std::sin(omega * t)) / (omega * omega);
  return {g, 2.0 * g, -g};
}

FockPhases oscillator_fock_phases(double beta, double omega, double t, int n_cut, int steps) {
  if (omega == 0.0) throw DivisionError("modulation frequency must be nonzero");
  if (n_cut < 2) throw ConfigError("n_cut must be at least 2");
  Mat a = Mat::Zero(n_cut, n_cut);
  for (int n = 1; n < n_cut; ++n) a(n - 1, n) = std::sqrt(double(n));
  const Mat ad = a.adjoint();
  ControlSchedule s;
  s.basis = {a + ad, kI * (ad - a)};
  Segment seg;
  seg.duration = t;
  seg.shape = [beta, omega](double x) {
    RVec c(2);
    c << beta * std::cos(omega * x), beta * std::sin(omega * x);
    return c;
  };
  seg.coeffs = seg.shape(0.0);
  s.segments.push_back(seg);
  const EvolutionRecord rec = propagate(s, steps);
  const Vec psi0 = basis_ket(n_cut, 0);

  FockPhases out;
  out.phases = decompose_phase(rec, psi0);
  // Running phases. The total phase is measured against the coherent state
  // with the instantaneous displacement, so it is defined off the loop too.
  double dyn = 0.0;
  double prev_total = 0.0;
  for (std::size_t j = 0; j < rec.grid.size(); ++j) {
    const Vec psi = rec.propagators[j] * psi0;
    if (j > 0) {
      const Vec mid = rec.propagators[j - 1] * psi0;
      const double dt = rec.grid[j] - rec.grid[j - 1];
      // Step generator is constant on the interval; use the mean energy of
      // the two endpoint states.
      dyn -= 0.5 * dt * (expectation(mid, rec.step_hamiltonians[j - 1]).real() +
                         expectation(psi, rec.step_hamiltonians[j - 1]).real());
    }
    const cplx alpha = expectation(psi, a);
    Vec coh(n_cut);
    double fact = 1.0;
    for (int n = 0; n < n_cut; ++n) {
      if (n > 0) fact *= std::sqrt(double(n));
      coh(n) = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / fact;
    }
    double total = std::arg(coh.dot(psi));
    if (j > 0) total = prev_total + wrap_angle(total - prev_total);
    prev_total = total;
    out.times.push_back(rec.grid[j]);
    out.dynamical.push_back(dyn);
    out.geometric.push_back(total - dyn);
  }
  const Vec fin = rec.final_propagator() * psi0;
  out.truncation_leakage = fin.tail(std::min(4, n_cut)).norm();
  return out;
}

IonGate ion_unconventional_gate(double omega_d, double delta, double phi, int loop_samples) {
  if (delta == 0.0) throw DivisionError("detuning must be nonzero");
  if (loop_samples < 8) throw ConfigError("loop_samples must be >= 8");
  IonGate g;
  const double r = omega_d / delta;
  g.gamma = -2.0 * kPi * r * r;
  g.geometric = -g.gamma;
  g.dynamical = 2.0 * g.gamma;
  g.enclosed_area = kPi * r * r;
  // Sampled displacement loop alpha(t) = r e^{i(phi + pi/2)} (e^{-i delta t} - 1).
  const cplx pref = r * std::exp(kI * (phi + kPi / 2));
  const double period = 2.0 * kPi / std::abs(delta);
  auto z = [&](double t) { return pref * (std::exp(-kI * delta * t) - 1.0); };
  double acc = 0.0;
  for (int k = 0; k < loop_samples; ++k) {
    const cplx z0 = z(period * k / loop_samples);
    const cplx z1 = z(period * (k + 1) / loop_samples);
    acc += std::imag(std::conj(z0) * z1);  // exact for the polygon
  }
  g.loop_integral = acc;
  g.gate = Mat::Identity(4, 4);
  g.gate(1, 1) = std::exp(kI * g.gamma);
  g.gate(2, 2) = std::exp(kI * g.gamma);
  const Mat sgate = diag2(1.0, kI);
  Mat u = Mat::Identity(4, 4);
  u(1, 1) = u(2, 2) = std::exp(-kI * kPi / 2.0);
  g.cz = u * kron(sgate, sgate);
  Mat cz = Mat::Identity(4, 4);
  cz(3, 3) = -1.0;
  g.cz_residual = (g.gate * kron(sgate, sgate) - cz).norm();
  return g;
}

}  // namespace hforge
