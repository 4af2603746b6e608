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

#include <mqpulse/mas_hamiltonian.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mqpulse {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void QuadrupoleParams::validate() const {
  require(std::isfinite(cq_hz) && cq_hz >= 0.0,
          "quad.cq_hz must be finite and >= 0");
  require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0,
          "quad.eta must lie in [0, 1]");
  require(spin.twice() >= 2, "quad.spin must be >= 1 for a quadrupolar nucleus");
}

void SpinSystemParams::validate() const {
  quad.validate();
  require(std::isfinite(larmor_hz) && larmor_hz > 0.0,
          "larmor_hz must be > 0");
  require(std::isfinite(shift_ppm), "shift_ppm must be finite");
  require(std::isfinite(rotor_hz) && rotor_hz >= 0.0, "rotor_hz must be >= 0");
}

void Orientation::validate() const {
  require(alpha >= 0.0 && alpha < kTwoPi, "orientation.alpha must lie in [0, 2pi)");
  require(beta >= 0.0 && beta <= std::numbers::pi,
          "orientation.beta must lie in [0, pi]");
  require(gamma >= 0.0 && gamma < kTwoPi, "orientation.gamma must lie in [0, 2pi)");
}

double wigner_small_d2(int m1, int m2, double beta) {
  constexpr int j = 2;
  if (std::abs(m1) > j || std::abs(m2) > j)
    throw std::invalid_argument("wigner_small_d2: |m| > 2");
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const double prefactor = std::sqrt(factorial(j + m1) * factorial(j - m1) *
                                     factorial(j + m2) * factorial(j - m2));
  double sum = 0.0;
  for (int k = 0; k <= 2 * j; ++k) {
    const int a = j + m2 - k;
    const int b = j - k - m1;
    const int d = k - m2 + m1;
    if (a < 0 || b < 0 || d < 0) continue;
    const double sign = (k - m2 + m1) % 2 == 0 ? 1.0 : -1.0;
    sum += sign / (factorial(a) * factorial(k) * factorial(b) * factorial(d)) *
           std::pow(c, 2 * j - 2 * k + m2 - m1) * std::pow(s, 2 * k - m2 + m1);
  }
  return prefactor * sum;
}

cx wigner_d2(int m1, int m2, double alpha, double beta, double gamma) {
  return std::polar(1.0, -m1 * alpha) * wigner_small_d2(m1, m2, beta) *
         std::polar(1.0, -m2 * gamma);
}

QuadrupoleModel::QuadrupoleModel(const SpinSystemParams& params,
                                 const Orientation& orient)
    : params_(params) {
  params.quad.validate();
  if (params.second_order && !(params.larmor_hz > 0.0))
    throw std::invalid_argument(
        "larmor_hz must be > 0 when second-order terms are enabled");
  const SpinQuantumNumber spin = params.quad.spin;
  const double two_i = spin.twice();
  omega_q_ = kTwoPi * 3.0 * params.quad.cq_hz / (two_i * (two_i - 1.0));
  omega_0_ = kTwoPi * params.larmor_hz;

  const double eta_term = params.quad.eta / std::sqrt(6.0);
  const std::array<double, 5> pas{eta_term, 0.0, 1.0, 0.0, eta_term};
  for (int n = -2; n <= 2; ++n) {
    cx acc = 0.0;
    for (int p = -2; p <= 2; ++p)
      acc += wigner_d2(p, n, orient.alpha, orient.beta, orient.gamma) *
             pas[p + 2];
    rotor_frame_[n + 2] = acc;
  }
  for (int n = -2; n <= 2; ++n)
    for (int q = 0; q <= 2; ++q)
      magic_d_[n + 2][q] = wigner_small_d2(n, q, kMagicAngle);
}

QuadFrequencies QuadrupoleModel::at(double t) const {
  const double phase = kTwoPi * params_.rotor_hz * t;
  std::array<cx, 3> lab{};
  for (int n = -2; n <= 2; ++n) {
    const cx rotated = std::polar(1.0, -n * phase) * rotor_frame_[n + 2];
    for (int q = 0; q <= 2; ++q) lab[q] += magic_d_[n + 2][q] * rotated;
  }
  QuadFrequencies w;
  w.w1 = omega_q_ / 6.0 * lab[0].real();
  if (params_.second_order && omega_q_ != 0.0) {
    const double scale = omega_q_ * omega_q_ / (12.0 * omega_0_);
    w.w21 = -scale * std::norm(lab[1]);
    w.w22 = scale * std::norm(lab[2]);
  }
  return w;
}

RVector QuadrupoleModel::drift_diagonal(double t) const {
  const QuadFrequencies w = at(t);
  const SpinQuantumNumber spin = params_.quad.spin;
  const double casimir = spin.casimir();
  const double shift = omega_0_ * params_.shift_ppm * 1e-6;
  RVector diag(spin.dimension());
  for (int k = 0; k < spin.dimension(); ++k) {
    const double m = spin.value() - k;
    const double m2 = m * m;
    diag[k] = shift * m + w.w1 * (3.0 * m2 - casimir) +
              w.w21 * (-8.0 * m2 + 4.0 * casimir - 1.0) * m +
              w.w22 * (-2.0 * m2 + 2.0 * casimir - 1.0) * m;
  }
  return diag;
}

QuadFrequencies quad_frequencies(const SpinSystemParams& params,
                                 const Orientation& orient, double t) {
  return QuadrupoleModel(params, orient).at(t);
}

CMatrix drift_hamiltonian(const SpinSystemParams& params,
                          const Orientation& orient, const SpinOperators& ops,
                          double t) {
  if (ops.spin != params.quad.spin)
    throw std::invalid_argument(
        "drift_hamiltonian: spin operators do not match the spin system");
  return QuadrupoleModel(params, orient)
      .drift_diagonal(t)
      .cast<cx>()
      .asDiagonal();
}

CMatrix total_hamiltonian(const CMatrix& drift, double ux, double uy,
                          const SpinOperators& ops) {
  if (drift.rows() != ops.dimension() || drift.cols() != ops.dimension())
    throw std::invalid_argument(
        "total_hamiltonian: drift dimension does not match spin operators");
  return drift + ux * ops.ix + uy * ops.iy;
}

}  // namespace mqpulse
