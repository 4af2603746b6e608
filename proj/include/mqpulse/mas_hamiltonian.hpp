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

#pragma once

#include <mqpulse/spin_operators.hpp>

#include <array>

namespace mqpulse {

struct QuadrupoleParams {
  double cq_hz = 0.0;
  double eta = 0.0;
  SpinQuantumNumber spin;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const QuadrupoleParams&, const QuadrupoleParams&) = default;
};

struct SpinSystemParams {
  QuadrupoleParams quad;
  double larmor_hz = 0.0;
  double shift_ppm = 0.0;
  double rotor_hz = 0.0;
  bool second_order = true;

  void validate() const;

  friend bool operator==(const SpinSystemParams&, const SpinSystemParams&) = default;
};

/// Euler angles (radians) of the quadrupole principal axis frame in the
/// rotor frame.
struct Orientation {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  void validate() const;
};

/// Secular quadrupolar coefficients in rad/s.
struct QuadFrequencies {
  double w1 = 0.0;
  double w21 = 0.0;
  double w22 = 0.0;
};

/// Reduced Wigner matrix element d^2_{m1,m2}(beta).
double wigner_small_d2(int m1, int m2, double beta);

/// D^2_{m1,m2}(alpha, beta, gamma) = exp(-i m1 alpha) d^2_{m1,m2}(beta)
/// exp(-i m2 gamma).
cx wigner_d2(int m1, int m2, double alpha, double beta, double gamma);

/// Quadrupole coupling of one crystallite under MAS.
///
/// Conventions: the normalised PAS tensor has components rho_20 = 1,
/// rho_2,+-2 = eta/sqrt(6). Frame changes apply
///   A^{B}_{2q} = sum_p D^2_{pq}(Omega_AB) A^{A}_{2p},
/// first with Omega_PR = (alpha, beta, gamma), then with
/// Omega_RL = (omega_r t, magic angle, 0). The corresponding Cartesian
/// transform is V_B = R^T V_A R with R = Rz(alpha) Ry(beta) Rz(gamma).
/// With omega_Q = 2 pi 3 C_Q / (2I(2I-1)) and lab components V_2q:
///   w1  =  (omega_Q / 6) V_20
///   w21 = -omega_Q^2 |V_21|^2 / (12 omega_0)
///   w22 =  omega_Q^2 |V_22|^2 / (12 omega_0)
/// which is the second-order perturbation result for Zeeman levels
/// E_m = omega_0 m.
class QuadrupoleModel {
 public:
  QuadrupoleModel(const SpinSystemParams& params, const Orientation& orient);

  QuadFrequencies at(double t) const;

  /// Diagonal of the drift Hamiltonian (rad/s), ordered m = +I ... -I.
  RVector drift_diagonal(double t) const;

  const SpinSystemParams& params() const { return params_; }

 private:
  SpinSystemParams params_;
  double omega_q_;
  double omega_0_;
  // rotor-frame components A^R_{2n}, index n + 2
  std::array<cx, 5> rotor_frame_{};
  // d^2_{n,q}(magic angle) for q = 0, 1, 2, index [n + 2][q]
  std::array<std::array<double, 3>, 5> magic_d_{};
};

QuadFrequencies quad_frequencies(const SpinSystemParams& params,
                                 const Orientation& orient, double t);

/// Diagonal in the Zeeman basis; returned as a dense matrix.
CMatrix drift_hamiltonian(const SpinSystemParams& params,
                          const Orientation& orient, const SpinOperators& ops,
                          double t);

/// drift + ux Ix + uy Iy
CMatrix total_hamiltonian(const CMatrix& drift, double ux, double uy,
                          const SpinOperators& ops);

}  // namespace mqpulse
