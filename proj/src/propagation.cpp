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

#include <mqpulse/propagation.hpp>

#include <cmath>
#include <stdexcept>

namespace mqpulse {

void PulseShape::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0))
    throw std::invalid_argument("pulse dt must be finite and > 0");
  if (values.rows() < 1) throw std::invalid_argument("pulse must have at least one step");
  if (!values.allFinite()) throw std::invalid_argument("pulse values must be finite");
}

StepEigenDecomposition step_propagator(const CMatrix& h, double dt) {
  if (h.rows() != h.cols()) throw std::invalid_argument("step_propagator: h must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance * scale)
    throw std::invalid_argument("step_propagator: h is not Hermitian");
  const CMatrix hermitian = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("step_propagator: eigendecomposition failed");
  StepEigenDecomposition step;
  step.eigenvalues = solver.eigenvalues();
  step.eigenvectors = solver.eigenvectors();
  const Eigen::VectorXcd phases =
      (step.eigenvalues * (-dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
  step.propagator = step.eigenvectors * phases.asDiagonal() * step.eigenvectors.adjoint();
  return step;
}

Trajectory evolve(const PulseShape& pulse, const EnsembleMember& member,
                  const InitialState& initial, const TargetOperator& target) {
  pulse.validate();
  const SpinOperators ops = angular_momentum_operators(member.params.quad.spin);
  if (initial.matrix.rows() != ops.dimension() || target.matrix.rows() != ops.dimension())
    throw std::invalid_argument("evolve: state dimension does not match the spin system");
  const QuadrupoleModel model(member.params, member.orient);
  const int n = pulse.n_steps();

  Trajectory traj;
  traj.forward.reserve(n + 1);
  traj.steps.reserve(n);
  traj.forward.push_back(initial.matrix);
  for (int j = 0; j < n; ++j) {
    const CMatrix drift =
        model.drift_diagonal(step_sample_time(j, pulse.dt)).cast<cx>().asDiagonal();
    const CMatrix h = total_hamiltonian(drift, member.rf_scale * pulse.values(j, 0),
                                        member.rf_scale * pulse.values(j, 1), ops);
    traj.steps.push_back(step_propagator(h, pulse.dt));
    const CMatrix& u = traj.steps.back().propagator;
    traj.forward.push_back(u * traj.forward.back() * u.adjoint());
  }

  traj.backward.assign(n + 1, CMatrix());
  traj.backward[n] = target.matrix.adjoint();
  for (int j = n - 1; j >= 0; --j) {
    const CMatrix& u = traj.steps[j].propagator;
    traj.backward[j] = u.adjoint() * traj.backward[j + 1] * u;
  }
  return traj;
}

CMatrix derivative_gain_matrix(const RVector& eigenvalues, double dt) {
  const auto dim = eigenvalues.size();
  CMatrix g(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    for (Eigen::Index n = 0; n < dim; ++n) {
      const double x = (eigenvalues[m] - eigenvalues[n]) * dt;
      // (e^{ix} - 1) / (ix) = e^{ix/2} sin(x/2) / (x/2), free of cancellation
      g(m, n) = std::abs(x) < kDegeneracyThreshold
                    ? cx(1.0, 0.0)
                    : std::polar(std::sin(0.5 * x) / (0.5 * x), 0.5 * x);
    }
  }
  return g;
}

CMatrix propagator_derivative(const StepEigenDecomposition& step,
                              const CMatrix& control_op, double dt) {
  const CMatrix& v = step.eigenvectors;
  const CMatrix rotated = v.adjoint() * (cx(0.0, -dt) * control_op) * v;
  const CMatrix g = derivative_gain_matrix(step.eigenvalues, dt);
  return v * rotated.cwiseProduct(g) * v.adjoint();
}

CMatrix commutator_series_derivative(const CMatrix& h, const CMatrix& control_op,
                                     double dt, int order) {
  if (order < 0) throw std::invalid_argument("commutator_series_derivative: order < 0");
  const StepEigenDecomposition step = step_propagator(h, dt);
  CMatrix nested = control_op;
  CMatrix sum = nested;
  cx coefficient = 1.0;
  for (int l = 1; l <= order; ++l) {
    nested = h * nested - nested * h;
    coefficient *= cx(0.0, dt) / static_cast<double>(l + 1);
    sum += coefficient * nested;
  }
  return cx(0.0, -dt) * step.propagator * sum;
}

}  // namespace mqpulse
