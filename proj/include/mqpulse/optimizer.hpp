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

#include <mqpulse/group_basis.hpp>
#include <mqpulse/objective.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mqpulse {

struct LineSearchOptions {
  double sufficient_decrease = 1e-4;
  double curvature = 0.9;
  int max_evaluations = 30;

  friend bool operator==(const LineSearchOptions&, const LineSearchOptions&) = default;
};

struct OptimizerOptions {
  int max_iterations = 500;
  /// Stop when the infinity norm of the (scaled) gradient drops below this.
  double gradient_tolerance = 1e-7;
  /// Stop when |J_k - J_{k+1}| <= cost_tolerance * max(|J_k|, |J_{k+1}|).
  double cost_tolerance = 1e-10;
  int memory = 20;
  LineSearchOptions line_search;
  /// lambda in lambda * sum u^2 dt, added to the optimized objective only.
  double penalty_weight = 0.0;

  void validate() const;

  friend bool operator==(const OptimizerOptions&, const OptimizerOptions&) = default;
};

/// Returns the cost at x and writes the gradient into grad.
using CostGradientFn = std::function<double(const RVector& x, RVector& grad)>;

enum class StopReason {
  GradientTolerance,
  CostTolerance,
  MaxIterations,
  LineSearchFailure,
  NonFinite,
};

std::string to_string(StopReason reason);

struct IterationRecord {
  double cost = 0.0;
  double gradient_norm = 0.0;  // infinity norm
  double step_size = 0.0;      // 0 for the starting point
};

struct MinimizeResult {
  RVector x;
  double cost = 0.0;
  RVector gradient;
  std::vector<IterationRecord> history;
  StopReason reason = StopReason::MaxIterations;
  int evaluations = 0;
  std::string diagnostics;

  bool failed() const {
    return reason == StopReason::LineSearchFailure || reason == StopReason::NonFinite;
  }
};

/// Limited-memory BFGS with a strong-Wolfe line search.
MinimizeResult minimize(const CostGradientFn& problem, const RVector& x0,
                        const OptimizerOptions& opts);

struct ControlMode {
  enum class Kind { Grape, Group };
  Kind kind = Kind::Grape;
  int basis_size = 0;

  static ControlMode grape() { return {Kind::Grape, 0}; }
  static ControlMode group(int basis_size) { return {Kind::Group, basis_size}; }
  bool is_group() const { return kind == Kind::Group; }
  /// "grape" or "group_M<size>"
  std::string label() const;

  friend bool operator==(const ControlMode&, const ControlMode&) = default;
};

/// Uniform i.i.d. start: GRAPE values in [-scale, scale] laid out as
/// [ux_0..ux_{N-1}, uy_0..uy_{N-1}]; GROUP coefficients in
/// [-scale/sqrt(M), scale/sqrt(M)] laid out the same way per channel.
RVector random_initial(const ControlMode& mode, double scale, int n_steps,
                       std::uint64_t seed);

/// Ensemble cost as a function of GRAPE controls or GROUP coefficients.
/// The optimizer sees variables divided by variable_scale() so that they
/// are O(1); evaluate() works in physical units (rad/s).
class PulseProblem {
 public:
  PulseProblem(std::shared_ptr<const EnsembleObjective> objective, ControlMode mode,
               double init_scale, std::optional<ResponseMatrix> response = std::nullopt);

  int dimension() const;
  int n_steps() const { return objective_->n_steps(); }
  double dt() const { return objective_->dt(); }
  const ControlMode& mode() const { return mode_; }
  double init_scale() const { return init_scale_; }
  double variable_scale() const { return init_scale_; }
  const EnsembleObjective& objective() const { return *objective_; }
  const std::optional<ResponseMatrix>& response() const { return response_; }

  /// Physical parameter vector -> piecewise-constant pulse.
  PulseShape pulse(const RVector& params) const;

  /// Ensemble cost J = 1 - E[F] (no penalty) and dJ/dparams.
  double evaluate(const RVector& params, RVector* grad) const;

  /// Objective handed to minimize: J plus the optional amplitude penalty,
  /// in scaled variables.
  CostGradientFn scaled_objective(double penalty_weight) const;

 private:
  std::shared_ptr<const EnsembleObjective> objective_;
  ControlMode mode_;
  double init_scale_;
  std::optional<ResponseMatrix> response_;
};

struct OptimizationRun {
  std::uint64_t seed = 0;
  ControlMode mode;
  RVector initial;  // physical units
  std::vector<IterationRecord> history;
  double final_cost = 1.0;
  double final_fidelity = 0.0;
  PulseShape pulse;
  ChannelArray coefficients;  // GROUP only
  StopReason reason = StopReason::MaxIterations;
  int evaluations = 0;
  bool failed = false;
  std::string message;
};

/// One seeded optimization of the pulse problem.
OptimizationRun optimize_pulse(const PulseProblem& problem, std::uint64_t seed,
                               const OptimizerOptions& opts);

/// Independent runs with seeds base_seed + i, sorted by final fidelity
/// (descending, ties by seed). Runs execute concurrently.
std::vector<OptimizationRun> multistart(const PulseProblem& problem, int n_starts,
                                        std::uint64_t base_seed,
                                        const OptimizerOptions& opts);

}  // namespace mqpulse
