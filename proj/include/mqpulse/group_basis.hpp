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

#include <mqpulse/propagation.hpp>

#include <functional>

namespace mqpulse {

/// S(t) multiplying every basis function; empty means S = 1.
using ShapeFunction = std::function<double(double t)>;

/// Linear map from basis coefficients to piecewise-constant values,
/// entries(m, j) = du_j / dc_m. Shared by both channels.
struct ResponseMatrix {
  RMatrix entries;  // M x N

  int basis_size() const { return static_cast<int>(entries.rows()); }
  int n_steps() const { return static_cast<int>(entries.cols()); }
};

struct GroupParametrization {
  int basis_size = 1;
  ChannelArray coefficients;  // M x 2, rad/s
  double duration = 0.0;
  int n_steps = 0;
  ShapeFunction shape;
};

/// entries(m, j) = sin((m + 1) pi j dt / T) S(j dt), T = N dt.
ResponseMatrix fourier_response(int basis_size, int n_steps, double dt,
                                const ShapeFunction& shape = {});

/// Wraps a measured or otherwise externally supplied response.
ResponseMatrix custom_response(RMatrix entries);

/// u_{k,j} = sum_m c_{k,m} entries(m, j)
PulseShape expand(const ChannelArray& coefficients, const ResponseMatrix& response,
                  double dt);
PulseShape expand(const GroupParametrization& parametrization,
                  const ResponseMatrix& response);

/// dJ/dc_{k,m} = sum_j dJ/du_{k,j} entries(m, j)
ChannelArray project_gradient(const ChannelArray& grad_u, const ResponseMatrix& response);

}  // namespace mqpulse
