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

#include <memory>
#include <vector>

namespace mqpulse {

struct Normalization {
  double n_factor = 9.0 / 4.0;
};

/// Largest |<+I| U rho0 U^dagger |-I>|^2 over unitaries U, which is
/// ((lambda_max - lambda_min) / 2)^2 of rho0. Gives 9/4 for rho0 = Iz, I = 3/2.
Normalization default_normalization(const InitialState& initial);

struct CostReport {
  double cost = 1.0;
  double fidelity = 0.0;
  ChannelArray gradient;  // dJ/du, per rad/s
};

/// |Tr[target^dagger rho]|^2 / n_factor
double fidelity(const CMatrix& rho_final, const TargetOperator& target,
                const Normalization& norm);

/// Cost, fidelity and exact gradient for a single Hamiltonian.
CostReport member_cost_gradient(const PulseShape& pulse, const EnsembleMember& member,
                                const Normalization& norm);

/// Weighted expectation over the ensemble.
CostReport ensemble_cost_gradient(const PulseShape& pulse, const Ensemble& ensemble,
                                  const Normalization& norm);

/// Reusable ensemble objective for a fixed time grid. Drift diagonals of
/// every member are sampled once at construction; each evaluation then
/// runs one forward and one backward sweep per member, members in
/// parallel, followed by a reduction in member order.
class EnsembleObjective {
 public:
  EnsembleObjective(Ensemble ensemble, int n_steps, double dt, Normalization norm);

  CostReport evaluate(const ChannelArray& controls, bool with_gradient = true) const;
  CostReport evaluate(const PulseShape& pulse, bool with_gradient = true) const;

  /// Per-member reports in ensemble order.
  std::vector<CostReport> evaluate_members(const ChannelArray& controls,
                                           bool with_gradient = true) const;

  int n_steps() const { return n_steps_; }
  double dt() const { return dt_; }
  const Ensemble& ensemble() const { return ensemble_; }
  const Normalization& normalization() const { return norm_; }

 private:
  Ensemble ensemble_;
  int n_steps_;
  double dt_;
  Normalization norm_;
  // 4 x n_steps per member
  std::vector<Eigen::Matrix<double, 4, Eigen::Dynamic>> drift_;
};

}  // namespace mqpulse
