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

#include <mqpulse/spin_operators.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mqpulse {

SpinQuantumNumber::SpinQuantumNumber(int twice) : twice_(twice) {
  if (twice < 1)
    throw std::invalid_argument("spin must be positive, got 2I = " +
                                std::to_string(twice));
}

SpinQuantumNumber SpinQuantumNumber::from_double(double spin) {
  const double twice = 2.0 * spin;
  if (!std::isfinite(spin) || spin <= 0.0 ||
      std::abs(twice - std::round(twice)) > 1e-12)
    throw std::invalid_argument("spin must be a positive half-integer, got " +
                                std::to_string(spin));
  return SpinQuantumNumber(static_cast<int>(std::lround(twice)));
}

SpinOperators angular_momentum_operators(SpinQuantumNumber spin) {
  const int dim = spin.dimension();
  const double s = spin.value();
  // raising operator: <m+1|I+|m> = sqrt(I(I+1) - m(m+1)); basis index k
  // holds m = I - k, so m+1 sits at index k-1.
  CMatrix raise = CMatrix::Zero(dim, dim);
  CMatrix iz = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = s - k;
    iz(k, k) = m;
    if (k > 0) raise(k - 1, k) = std::sqrt(spin.casimir() - m * (m + 1.0));
  }
  const CMatrix lower = raise.adjoint();
  SpinOperators ops;
  ops.spin = spin;
  ops.ix = 0.5 * (raise + lower);
  ops.iy = cx(0.0, -0.5) * (raise - lower);
  ops.iz = iz;
  return ops;
}

TargetOperator three_quantum_target(SpinQuantumNumber spin) {
  if (spin.twice() != kSpinThreeHalvesTwice)
    throw std::invalid_argument(
        "triple-quantum target is defined for spin 3/2 only, got spin " +
        std::to_string(spin.value()));
  TargetOperator target{CMatrix::Zero(4, 4)};
  target.matrix(0, 3) = 1.0;
  return target;
}

InitialState thermal_state(SpinQuantumNumber spin) {
  return InitialState{angular_momentum_operators(spin).iz};
}

}  // namespace mqpulse
