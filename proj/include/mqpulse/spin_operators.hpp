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

#include <mqpulse/types.hpp>

namespace mqpulse {

/// Spin quantum number stored as 2I so half-integers are exact.
class SpinQuantumNumber {
 public:
  constexpr SpinQuantumNumber() = default;

  /// Throws std::invalid_argument unless twice >= 1.
  explicit SpinQuantumNumber(int twice);

  /// Accepts 0.5, 1, 1.5, ...; anything else throws std::invalid_argument.
  static SpinQuantumNumber from_double(double spin);

  int twice() const { return twice_; }
  double value() const { return 0.5 * twice_; }
  int dimension() const { return twice_ + 1; }
  /// I(I+1)
  double casimir() const { return value() * (value() + 1.0); }

  friend bool operator==(SpinQuantumNumber, SpinQuantumNumber) = default;

 private:
  int twice_ = 3;
};

inline constexpr int kSpinThreeHalvesTwice = 3;

/// Zeeman-basis angular momentum matrices, rows/columns ordered
/// m = +I, I-1, ..., -I.
struct SpinOperators {
  SpinQuantumNumber spin;
  CMatrix ix;
  CMatrix iy;
  CMatrix iz;

  int dimension() const { return spin.dimension(); }
  /// Diagonal of iz, i.e. the magnetic quantum numbers in basis order.
  RVector m_values() const { return iz.diagonal().real(); }
};

struct TargetOperator {
  CMatrix matrix;
};

struct InitialState {
  CMatrix matrix;
};

SpinOperators angular_momentum_operators(SpinQuantumNumber spin);

/// |+I><-I| for I = 3/2. Other spins are rejected.
TargetOperator three_quantum_target(SpinQuantumNumber spin);

/// Reduced thermal-equilibrium density operator, rho(0) = Iz.
InitialState thermal_state(SpinQuantumNumber spin);

}  // namespace mqpulse
