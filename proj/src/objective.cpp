/* Copyright 2026 The mqpulse Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <mqpulse/objective.hpp>

#include <cmath>
#include <stdexcept>

namespace mqpulse {

namespace {

using M4c = Eigen::Matrix4cd;
using M4d = Eigen::Matrix4d;
using V4d = Eigen::Vector4d;
using V4c = Eigen::Vector4cd;
using DriftTable = Eigen::Matrix<double, 4, Eigen::Dynamic>;

// Spin-3/2 operators split into real parts: Iy = -i ky.
struct RealSpinOperators {
  M4d ix;
  M4d ky;
  V4d m;
};

const RealSpinOperators& spin_three_halves() {
  static const RealSpinOperators ops = [] {
    const SpinOperators s = angular_momentum_operators(SpinQuantumNumber(3));
    RealSpinOperators r;
    r.ix = s.ix.real();
    r.ky = -s.iy.imag();
    r.m = s.m_values();
    return r;
  }();
  return ops;
}

// Implicit QL on a symmetric tridiagonal 4x4. d: diagonal in, eigenvalues
// out. e: subdiagonal in e[0..2], destroyed. z: eigenvectors as columns.
bool tridiagonal_eigen4(double d[4], double e[4], M4d& z) {
  z.setIdentity();
  e[3] = 0.0;
  for (int l = 0; l < 4; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < 3; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (++iter > 60) return false;
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::sqrt(g * g + 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::sqrt(f * f + g * g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < 4; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return true;
}

// exp(-i phi m) for m = 3/2, 1/2, -1/2, -3/2 from cos(phi), sin(phi), with
// phi/2 on the same branch as atan2.
V4c phase_factors(double c, double s) {
  double ch, sh;
  if (c >= 0.0) {
    ch = std::sqrt(0.5 * (1.0 + c));
    sh = 0.5 * s / ch;
  } else {
    sh = std::copysign(std::sqrt(0.5 * (1.0 - c)), s);
    ch = 0.5 * s / sh;
  }
  const cx half(ch, -sh);  // exp(-i phi/2)
  const cx three = half * half * half;
  return V4c(three, half, std::conj(half), std::conj(three));
}

// (exp(ix) - 1) / (ix) from the precomputed exp(ix); series near x = 0
cx gain(double x, cx expix) {
  if (std::abs(x) < 1e-3) return cx(1.0 - x * x / 6.0, 0.5 * x - x * x * x / 24.0);
  const cx d = expix - 1.0;
  return cx(d.imag() / x, -d.real() / x);
}

struct Workspace {
  std::vector<M4d> w;
  std::vector<V4d> e;
  std::vector<double> cphi, sphi;
  std::vector<V4c> phase;  // exp(-i e dt)
  std::vector<M4c> b;  // accumulated propagator before step j

  void resize(int n) {
    w.resize(n);
    e.resize(n);
    cphi.resize(n);
    sphi.resize(n);
    phase.resize(n);
    b.resize(n + 1);
  }
};

void scale_rows(const V4c& f, M4d& re, M4d& im) {
  for (int a = 0; a < 4; ++a) {
    const double fr = f[a].real(), fi = f[a].imag();
    for (int k = 0; k < 4; ++k) {
      const double xr = re(a, k), xi = im(a, k);
      re(a, k) = fr * xr - fi * xi;
      im(a, k) = fr * xi + fi * xr;
    }
  }
}

// H = Z (D + a Ix) Z^dagger with Z = exp(-i phi Iz), so the eigenproblem
// is real symmetric tridiagonal and V = Z W. The adjoint state stays rank
// one, lambda_j = l r^dagger, so the backward sweep only moves vectors.
CostReport run_member(const DriftTable& drift, double rf_scale,
                      const ChannelArray& controls, double dt,
                      const Normalization& norm, bool with_gradient, Workspace& ws) {
  const RealSpinOperators& ops = spin_three_halves();
  const int n = static_cast<int>(controls.rows());
  ws.resize(n);

  ws.b[0].setIdentity();
  M4d re, im, tr, ti;
  for (int j = 0; j < n; ++j) {
    const double ux = rf_scale * controls(j, 0);
    const double uy = rf_scale * controls(j, 1);
    const double amplitude = std::hypot(ux, uy);
    ws.cphi[j] = amplitude > 0.0 ? ux / amplitude : 1.0;
    ws.sphi[j] = amplitude > 0.0 ? uy / amplitude : 0.0;
    double d[4], sub[4];
    for (int k = 0; k < 4; ++k) d[k] = drift(k, j);
    for (int k = 0; k < 3; ++k) sub[k] = amplitude * ops.ix(k + 1, k);
    if (!tridiagonal_eigen4(d, sub, ws.w[j]))
      throw std::runtime_error("step eigendecomposition did not converge");
    ws.e[j] = V4d(d[0], d[1], d[2], d[3]);
    for (int a = 0; a < 4; ++a) ws.phase[j][a] = std::polar(1.0, -d[a] * dt);
    const V4c z = phase_factors(ws.cphi[j], ws.sphi[j]);

    re = ws.b[j].real();
    im = ws.b[j].imag();
    scale_rows(z.conjugate(), re, im);
    tr.noalias() = ws.w[j].transpose() * re;
    ti.noalias() = ws.w[j].transpose() * im;
    scale_rows(ws.phase[j], tr, ti);
    re.noalias() = ws.w[j] * tr;
    im.noalias() = ws.w[j] * ti;
    scale_rows(z, re, im);
    ws.b[j + 1].real() = re;
    ws.b[j + 1].imag() = im;
  }

  // rho(T)(0,3) with rho = B diag(m) B^dagger
  const M4c& bn = ws.b[n];
  cx overlap = 0.0;
  for (int k = 0; k < 4; ++k) overlap += ops.m[k] * bn(0, k) * std::conj(bn(3, k));
  CostReport report;
  report.fidelity = std::norm(overlap) / norm.n_factor;
  report.cost = 1.0 - report.fidelity;
  if (!with_gradient) return report;

  report.gradient.setZero(n, 2);
  if (overlap == cx(0.0, 0.0)) return report;
  const cx conj_overlap = std::conj(overlap);
  const double prefactor = -2.0 / norm.n_factor;
  const cx cf(0.0, -rf_scale * dt);
  const cx i1(0.0, 1.0);

  V4c l = V4c::Unit(3);
  V4c r = V4c::Unit(0);
  Eigen::Matrix4cd g;
  for (int j = n - 1; j >= 0; --j) {
    const M4d& w = ws.w[j];
    const M4c& b = ws.b[j];
    const V4c z = phase_factors(ws.cphi[j], ws.sphi[j]);
    const V4c zc = z.conjugate();
    const V4c phc = ws.phase[j].conjugate();
    // eigenbasis images V^dagger l_j, V^dagger r_j after pulling back through U_j
    const V4c lt = phc.cwiseProduct(w.transpose() * zc.cwiseProduct(l));
    const V4c rt = phc.cwiseProduct(w.transpose() * zc.cwiseProduct(r));
    l = z.cwiseProduct(w * lt);
    r = z.cwiseProduct(w * rt);
    // V^dagger rho_j l_j and V^dagger rho_j r_j
    const V4c rl = b * ops.m.cwiseProduct(b.adjoint() * l);
    const V4c rr = b * ops.m.cwiseProduct(b.adjoint() * r);
    const V4c x = w.transpose() * zc.cwiseProduct(rl);
    const V4c y = w.transpose() * zc.cwiseProduct(rr);

    const M4d a = w.transpose() * ops.ix * w;
    const M4d bk = w.transpose() * ops.ky * w;
    const V4d& e = ws.e[j];
    const V4c& ph = ws.phase[j];
    for (int p = 0; p < 4; ++p) {
      g(p, p) = 1.0;
      for (int q = p + 1; q < 4; ++q) {
        g(p, q) = gain((e[p] - e[q]) * dt, std::conj(ph[p]) * ph[q]);
        g(q, p) = std::conj(g(p, q));
      }
    }
    cx as = 0.0, bs = 0.0, at = 0.0, bt = 0.0;
    for (int p = 0; p < 4; ++p) {
      const cx rp = std::conj(rt[p]);
      for (int q = 0; q < 4; ++q) {
        const cx s = rp * x[q] * g(p, q);
        const cx t = lt[p] * std::conj(y[q] * g(p, q));
        as += a(p, q) * s;
        bs += bk(p, q) * s;
        at += a(p, q) * t;
        bt += bk(p, q) * t;
      }
    }
    const double c = ws.cphi[j];
    const double sn = ws.sphi[j];
    const cx gx = cf * (c * as + i1 * sn * bs) + std::conj(cf) * (c * at - i1 * sn * bt);
    const cx gy = cf * (sn * as - i1 * c * bs) + std::conj(cf) * (sn * at + i1 * c * bt);
    report.gradient(j, 0) = prefactor * (gx * conj_overlap).real();
    report.gradient(j, 1) = prefactor * (gy * conj_overlap).real();
  }
  return report;
}

void check_ensemble(const Ensemble& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("ensemble must not be empty");
  double total = 0.0;
  for (const auto& m : ensemble) {
    if (!(m.weight > 0.0)) throw std::invalid_argument("ensemble weights must be > 0");
    if (!(m.rf_scale > 0.0)) throw std::invalid_argument("ensemble rf_scale must be > 0");
    if (m.params.quad.spin.twice() != kSpinThreeHalvesTwice)
      throw std::invalid_argument("objective supports spin 3/2 members only");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("ensemble weights must sum to 1");
}

}  // namespace

Normalization default_normalization(const InitialState& initial) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(initial.matrix);
  const double half_spread =
      0.5 * (solver.eigenvalues().maxCoeff() - solver.eigenvalues().minCoeff());
  if (!(half_spread > 0.0))
    throw std::invalid_argument("initial state has no population difference");
  return Normalization{half_spread * half_spread};
}

double fidelity(const CMatrix& rho_final, const TargetOperator& target,
                const Normalization& norm) {
  if (rho_final.rows() != target.matrix.rows() || rho_final.cols() != target.matrix.cols())
    throw std::invalid_argument("fidelity: dimension mismatch");
  return std::norm((target.matrix.adjoint() * rho_final).trace()) / norm.n_factor;
}

EnsembleObjective::EnsembleObjective(Ensemble ensemble, int n_steps, double dt,
                                     Normalization norm)
    : ensemble_(std::move(ensemble)), n_steps_(n_steps), dt_(dt), norm_(norm) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(norm.n_factor > 0.0)) throw std::invalid_argument("n_factor must be > 0");
  for (const auto& m : ensemble_)
    if (m.params.quad.spin.twice() != kSpinThreeHalvesTwice)
      throw std::invalid_argument("objective supports spin 3/2 members only");
  if (ensemble_.empty()) throw std::invalid_argument("ensemble must not be empty");
  drift_.resize(ensemble_.size());
  for (std::size_t i = 0; i < ensemble_.size(); ++i) {
    const QuadrupoleModel model(ensemble_[i].params, ensemble_[i].orient);
    DriftTable table(4, n_steps);
    for (int j = 0; j < n_steps; ++j) table.col(j) = model.drift_diagonal(step_sample_time(j, dt));
    drift_[i] = std::move(table);
  }
}

std::vector<CostReport> EnsembleObjective::evaluate_members(const ChannelArray& controls,
                                                            bool with_gradient) const {
  if (controls.rows() != n_steps_)
    throw std::invalid_argument("controls do not match the objective's time grid");
  if (!controls.allFinite()) throw std::invalid_argument("controls must be finite");
  const int count = static_cast<int>(ensemble_.size());
  std::vector<CostReport> reports(count);
#pragma omp parallel
  {
    Workspace ws;
#pragma omp for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i)
      reports[i] = run_member(drift_[i], ensemble_[i].rf_scale, controls, dt_, norm_,
                              with_gradient, ws);
  }
  return reports;
}

CostReport EnsembleObjective::evaluate(const ChannelArray& controls, bool with_gradient) const {
  const auto members = evaluate_members(controls, with_gradient);
  CostReport total;
  total.cost = 0.0;
  if (with_gradient) total.gradient.setZero(n_steps_, 2);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double w = ensemble_[i].weight;
    total.cost += w * members[i].cost;
    if (with_gradient) total.gradient += w * members[i].gradient;
  }
  total.fidelity = 1.0 - total.cost;
  return total;
}

CostReport EnsembleObjective::evaluate(const PulseShape& pulse, bool with_gradient) const {
  if (pulse.dt != dt_) throw std::invalid_argument("pulse dt does not match the objective");
  return evaluate(pulse.values, with_gradient);
}

CostReport member_cost_gradient(const PulseShape& pulse, const EnsembleMember& member,
                                const Normalization& norm) {
  pulse.validate();
  EnsembleMember single = member;
  single.weight = 1.0;
  const EnsembleObjective objective({single}, pulse.n_steps(), pulse.dt, norm);
  return objective.evaluate_members(pulse.values).front();
}

CostReport ensemble_cost_gradient(const PulseShape& pulse, const Ensemble& ensemble,
                                  const Normalization& norm) {
  check_ensemble(ensemble);
  pulse.validate();
  const EnsembleObjective objective(ensemble, pulse.n_steps(), pulse.dt, norm);
  return objective.evaluate(pulse.values);
}

}  // namespace mqpulse
