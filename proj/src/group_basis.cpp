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

#include <mqpulse/group_basis.hpp>

#include <cmath>
#include <stdexcept>

namespace mqpulse {

ResponseMatrix fourier_response(int basis_size, int n_steps, double dt,
                                const ShapeFunction& shape) {
  if (basis_size < 1) throw std::invalid_argument("basis_size must be >= 1");
  if (n_steps < 2) throw std::invalid_argument("n_steps must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  ResponseMatrix r;
  r.entries.resize(basis_size, n_steps);
  for (int j = 0; j < n_steps; ++j) {
    const double s = shape ? shape(j * dt) : 1.0;
    // (m+1) pi j dt / (N dt), written without dt to keep sin exact at j = 0, N/2
    const double phase = std::numbers::pi * j / n_steps;
    for (int m = 0; m < basis_size; ++m) r.entries(m, j) = std::sin((m + 1) * phase) * s;
  }
  return r;
}

ResponseMatrix custom_response(RMatrix entries) {
  if (entries.rows() < 1 || entries.cols() < 1)
    throw std::invalid_argument("response matrix must be nonempty");
  if (!entries.allFinite()) throw std::invalid_argument("response entries must be finite");
  return ResponseMatrix{std::move(entries)};
}

PulseShape expand(const ChannelArray& coefficients, const ResponseMatrix& response,
                  double dt) {
  if (coefficients.rows() != response.basis_size())
    throw std::invalid_argument("expand: coefficient count does not match basis size");
  PulseShape pulse;
  pulse.dt = dt;
  pulse.values.noalias() = response.entries.transpose() * coefficients;
  return pulse;
}

PulseShape expand(const GroupParametrization& parametrization,
                  const ResponseMatrix& response) {
  if (parametrization.basis_size != response.basis_size() ||
      parametrization.n_steps != response.n_steps())
    throw std::invalid_argument("expand: parametrization does not match response");
  return expand(parametrization.coefficients, response,
                parametrization.duration / parametrization.n_steps);
}

ChannelArray project_gradient(const ChannelArray& grad_u, const ResponseMatrix& response) {
  if (grad_u.rows() != response.n_steps())
    throw std::invalid_argument("project_gradient: gradient length does not match response");
  ChannelArray out;
  out.noalias() = response.entries * grad_u;
  return out;
}

}  // namespace mqpulse
