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

#include <mqpulse/powder.hpp>

#include <vector>

namespace mqpulse {

/// Piecewise-constant two-channel control, values in rad/s.
struct PulseShape {
  double dt = 0.0;
  ChannelArray values;

  int n_steps() const { return static_cast<int>(values.rows()); }
  double duration() const { return dt * n_steps(); }
  /// Throws std::invalid_argument on dt <= 0, no steps or non-finite values.
  void validate() const;
};

struct StepEigenDecomposition {
  RVector eigenvalues;   // rad/s
  CMatrix eigenvectors;  // columns are eigenvectors
  CMatrix propagator;    // exp(-i h dt)
};

struct Trajectory {
  std::vector<CMatrix> forward;   // rho(t_j), j = 0..N
  std::vector<CMatrix> backward;  // rho_t^dagger(t_j), j = 0..N
  std::vector<StepEigenDecomposition> steps;
};

/// Relative anti-Hermitian part tolerated by step_propagator.
inline constexpr double kHermitianTolerance = 1e-12;

/// |E_m - E_n| dt below this is treated as a degenerate pair.
inline constexpr double kDegeneracyThreshold = 1e-9;

StepEigenDecomposition step_propagator(const CMatrix& h, double dt);

/// Time at which the Hamiltonian of step j is sampled (step midpoint).
inline double step_sample_time(int j, double dt) { return (j + 0.5) * dt; }

/// Forward states rho_{j+1} = U_j rho_j U_j^dagger and backward states
/// lambda_j = U_j^dagger lambda_{j+1} U_j with lambda_N = target^dagger.
/// The member's rf scale multiplies both control channels.
Trajectory evolve(const PulseShape& pulse, const EnsembleMember& member,
                  const InitialState& initial, const TargetOperator& target);

/// G_{mn} = (exp(i (E_m - E_n) dt) - 1) / (i (E_m - E_n) dt), 1 on
/// degenerate pairs.
CMatrix derivative_gain_matrix(const RVector& eigenvalues, double dt);

/// D with dU/du = U D for a control entering as u * control_op.
CMatrix propagator_derivative(const StepEigenDecomposition& step,
                              const CMatrix& control_op, double dt);

/// Truncated commutator expansion of dU/du (including the leading U):
///   -i dt U sum_{l=0}^{order} (i dt)^l / (l+1)! [h, control_op]_l
CMatrix commutator_series_derivative(const CMatrix& h, const CMatrix& control_op,
                                     double dt, int order);

}  // namespace mqpulse
