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

#include <mqpulse/optimizer.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mqpulse {

namespace {

struct Sample {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // g(alpha) . d
  RVector g;
  bool finite = true;
};

struct LineSearchOutcome {
  bool ok = false;
  Sample point;
  int evaluations = 0;
};

double cubic_minimizer(const Sample& a, const Sample& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  return b.alpha -
         (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
}

// Strong-Wolfe line search, bracketing then zoom (Nocedal & Wright 3.5/3.6).
class LineSearch {
 public:
  LineSearch(const CostGradientFn& fn, const RVector& x, const RVector& d, double f0,
             double slope0, const LineSearchOptions& opts)
      : fn_(fn), x_(x), d_(d), f0_(f0), slope0_(slope0), opts_(opts) {}

  LineSearchOutcome run(double alpha1) {
    Sample prev{0.0, f0_, slope0_, RVector(), true};
    double alpha = alpha1;
    for (int i = 1; evaluations_ < opts_.max_evaluations; ++i) {
      Sample cur = evaluate(alpha);
      if (!cur.finite || cur.f > f0_ + opts_.sufficient_decrease * alpha * slope0_ ||
          (i > 1 && cur.f >= prev.f))
        return zoom(prev, cur);
      if (std::abs(cur.slope) <= -opts_.curvature * slope0_) return accept(cur);
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = cur;
      alpha *= 2.0;
    }
    return fallback(prev);
  }

 private:
  Sample evaluate(double alpha) {
    Sample s;
    s.alpha = alpha;
    s.g.resize(x_.size());
    s.f = fn_(x_ + alpha * d_, s.g);
    ++evaluations_;
    s.finite = std::isfinite(s.f) && s.g.allFinite();
    s.slope = s.finite ? s.g.dot(d_) : 0.0;
    return s;
  }

  LineSearchOutcome accept(Sample s) {
    return LineSearchOutcome{true, std::move(s), evaluations_};
  }

  // Best point so far satisfying sufficient decrease, if any.
  LineSearchOutcome fallback(const Sample& lo) {
    if (lo.alpha > 0.0 && lo.f < f0_) return accept(lo);
    return LineSearchOutcome{false, lo, evaluations_};
  }

  LineSearchOutcome zoom(Sample lo, Sample hi) {
    while (evaluations_ < opts_.max_evaluations) {
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      const double width = b - a;
      if (width <= 1e-16 * std::max(1.0, b)) break;
      double alpha = hi.finite ? cubic_minimizer(lo, hi) : std::numeric_limits<double>::quiet_NaN();
      if (!std::isfinite(alpha) || alpha < a + 0.1 * width || alpha > b - 0.1 * width)
        alpha = 0.5 * (a + b);
      Sample cur = evaluate(alpha);
      if (!cur.finite || cur.f > f0_ + opts_.sufficient_decrease * alpha * slope0_ ||
          cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opts_.curvature * slope0_) return accept(std::move(cur));
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    return fallback(lo);
  }

  const CostGradientFn& fn_;
  const RVector& x_;
  const RVector& d_;
  double f0_;
  double slope0_;
  LineSearchOptions opts_;
  int evaluations_ = 0;
};

struct CorrectionPair {
  RVector s;
  RVector y;
  double rho;
};

RVector two_loop(const std::deque<CorrectionPair>& pairs, const RVector& g) {
  RVector q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const auto& last = pairs.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return -q;
}

}  // namespace

void OptimizerOptions::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("optimizer.max_iterations must be >= 1");
  if (!(gradient_tolerance > 0.0))
    throw std::invalid_argument("optimizer.gradient_tolerance must be > 0");
  if (!(cost_tolerance > 0.0)) throw std::invalid_argument("optimizer.cost_tolerance must be > 0");
  if (memory < 1) throw std::invalid_argument("optimizer.memory must be >= 1");
  const auto& ls = line_search;
  if (!(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < ls.curvature &&
        ls.curvature < 1.0))
    throw std::invalid_argument(
        "optimizer.line_search requires 0 < sufficient_decrease < curvature < 1");
  if (ls.max_evaluations < 1)
    throw std::invalid_argument("optimizer.line_search.max_evaluations must be >= 1");
  if (!(penalty_weight >= 0.0)) throw std::invalid_argument("optimizer.penalty_weight must be >= 0");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientTolerance: return "gradient_tolerance";
    case StopReason::CostTolerance: return "cost_tolerance";
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::LineSearchFailure: return "line_search_failure";
    case StopReason::NonFinite: return "non_finite";
  }
  return "unknown";
}

MinimizeResult minimize(const CostGradientFn& problem, const RVector& x0,
                        const OptimizerOptions& opts) {
  opts.validate();
  MinimizeResult result;
  result.x = x0;
  result.gradient.resize(x0.size());
  if (!x0.allFinite()) {
    result.reason = StopReason::NonFinite;
    result.diagnostics = "starting point is not finite";
    return result;
  }
  result.cost = problem(result.x, result.gradient);
  result.evaluations = 1;
  if (!std::isfinite(result.cost) || !result.gradient.allFinite()) {
    result.reason = StopReason::NonFinite;
    result.diagnostics = "non-finite cost or gradient at the starting point";
    return result;
  }
  result.history.push_back({result.cost, result.gradient.lpNorm<Eigen::Infinity>(), 0.0});

  std::deque<CorrectionPair> pairs;
  result.reason = StopReason::MaxIterations;
  for (int k = 0; k < opts.max_iterations; ++k) {
    const double gnorm = result.gradient.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.gradient_tolerance) {
      result.reason = StopReason::GradientTolerance;
      break;
    }
    RVector d;
    double alpha0 = 1.0;
    if (!pairs.empty()) d = two_loop(pairs, result.gradient);
    if (pairs.empty() || !(d.dot(result.gradient) < 0.0)) {
      pairs.clear();
      d = -result.gradient;
      alpha0 = std::min(1.0, 1.0 / result.gradient.norm());
    }
    const double slope = d.dot(result.gradient);

    LineSearch search(problem, result.x, d, result.cost, slope, opts.line_search);
    LineSearchOutcome outcome = search.run(alpha0);
    result.evaluations += outcome.evaluations;
    if (!outcome.ok) {
      result.reason = StopReason::LineSearchFailure;
      std::ostringstream msg;
      msg << "line search found no decrease at iteration " << k << " (cost " << result.cost
          << ", slope " << slope << ")";
      result.diagnostics = msg.str();
      break;
    }

    Sample& next = outcome.point;
    RVector s = next.alpha * d;
    RVector y = next.g - result.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
    }
    const double previous = result.cost;
    result.x += next.alpha * d;
    result.cost = next.f;
    result.gradient = std::move(next.g);
    result.history.push_back(
        {result.cost, result.gradient.lpNorm<Eigen::Infinity>(), next.alpha});

    const double change = std::abs(previous - result.cost);
    if (change <= opts.cost_tolerance * std::max(std::abs(previous), std::abs(result.cost))) {
      result.reason = StopReason::CostTolerance;
      break;
    }
  }
  if (result.reason == StopReason::MaxIterations &&
      result.gradient.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance)
    result.reason = StopReason::GradientTolerance;
  return result;
}

std::string ControlMode::label() const {
  return is_group() ? "group_M" + std::to_string(basis_size) : "grape";
}

RVector random_initial(const ControlMode& mode, double scale, int n_steps,
                       std::uint64_t seed) {
  if (!(scale >= 0.0)) throw std::invalid_argument("random_initial: scale must be >= 0");
  const int per_channel = mode.is_group() ? mode.basis_size : n_steps;
  if (per_channel < 1) throw std::invalid_argument("random_initial: empty parameter vector");
  const double amplitude =
      mode.is_group() ? scale / std::sqrt(static_cast<double>(mode.basis_size)) : scale;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  RVector x(2 * per_channel);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = amplitude * uniform(rng);
  return x;
}

PulseProblem::PulseProblem(std::shared_ptr<const EnsembleObjective> objective,
                           ControlMode mode, double init_scale,
                           std::optional<ResponseMatrix> response)
    : objective_(std::move(objective)), mode_(mode), init_scale_(init_scale),
      response_(std::move(response)) {
  if (!objective_) throw std::invalid_argument("PulseProblem: objective is null");
  if (!(init_scale_ > 0.0)) throw std::invalid_argument("PulseProblem: init_scale must be > 0");
  if (mode_.is_group()) {
    if (!response_)
      response_ = fourier_response(mode_.basis_size, objective_->n_steps(), objective_->dt());
    if (response_->basis_size() != mode_.basis_size ||
        response_->n_steps() != objective_->n_steps())
      throw std::invalid_argument("PulseProblem: response matrix does not match the mode");
  }
}

int PulseProblem::dimension() const {
  return 2 * (mode_.is_group() ? mode_.basis_size : objective_->n_steps());
}

PulseShape PulseProblem::pulse(const RVector& params) const {
  if (params.size() != dimension())
    throw std::invalid_argument("PulseProblem: parameter vector has the wrong size");
  const Eigen::Index rows = params.size() / 2;
  const Eigen::Map<const ChannelArray> columns(params.data(), rows, 2);
  if (mode_.is_group()) return expand(ChannelArray(columns), *response_, dt());
  PulseShape p;
  p.dt = dt();
  p.values = columns;
  return p;
}

double PulseProblem::evaluate(const RVector& params, RVector* grad) const {
  const PulseShape p = pulse(params);
  const CostReport report = objective_->evaluate(p.values, grad != nullptr);
  if (grad) {
    grad->resize(dimension());
    Eigen::Map<ChannelArray> out(grad->data(), grad->size() / 2, 2);
    if (mode_.is_group())
      out = project_gradient(report.gradient, *response_);
    else
      out = report.gradient;
  }
  return report.cost;
}

CostGradientFn PulseProblem::scaled_objective(double penalty_weight) const {
  const double scale = variable_scale();
  return [this, scale, penalty_weight](const RVector& x, RVector& grad) {
    const RVector params = scale * x;
    double cost = evaluate(params, &grad);
    if (penalty_weight > 0.0) {
      const PulseShape p = pulse(params);
      cost += penalty_weight * p.values.squaredNorm() * dt();
      ChannelArray du = 2.0 * penalty_weight * dt() * p.values;
      Eigen::Map<ChannelArray> g(grad.data(), grad.size() / 2, 2);
      if (mode_.is_group())
        g += project_gradient(du, *response_);
      else
        g += du;
    }
    grad *= scale;
    return cost;
  };
}

OptimizationRun optimize_pulse(const PulseProblem& problem, std::uint64_t seed,
                               const OptimizerOptions& opts) {
  OptimizationRun run;
  run.seed = seed;
  run.mode = problem.mode();
  run.initial = random_initial(problem.mode(), problem.init_scale(), problem.n_steps(), seed);
  const double scale = problem.variable_scale();
  MinimizeResult result =
      minimize(problem.scaled_objective(opts.penalty_weight), run.initial / scale, opts);
  const RVector params = scale * result.x;
  run.history = std::move(result.history);
  run.reason = result.reason;
  run.evaluations = result.evaluations;
  run.failed = result.failed();
  run.message = result.diagnostics;
  run.pulse = problem.pulse(params);
  if (problem.mode().is_group())
    run.coefficients = Eigen::Map<const ChannelArray>(params.data(), params.size() / 2, 2);
  if (std::isfinite(result.cost)) {
    run.final_cost = opts.penalty_weight > 0.0 ? problem.evaluate(params, nullptr) : result.cost;
  } else {
    run.final_cost = std::numeric_limits<double>::quiet_NaN();
  }
  run.final_fidelity = 1.0 - run.final_cost;
  return run;
}

std::vector<OptimizationRun> multistart(const PulseProblem& problem, int n_starts,
                                        std::uint64_t base_seed,
                                        const OptimizerOptions& opts) {
  if (n_starts < 1) throw std::invalid_argument("multistart: n_starts must be >= 1");
  opts.validate();
  std::vector<OptimizationRun> runs(n_starts);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_starts; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    try {
      runs[i] = optimize_pulse(problem, seed, opts);
    } catch (const std::exception& e) {
      runs[i].seed = seed;
      runs[i].mode = problem.mode();
      runs[i].failed = true;
      runs[i].message = e.what();
      runs[i].final_cost = std::numeric_limits<double>::quiet_NaN();
      runs[i].final_fidelity = std::numeric_limits<double>::quiet_NaN();
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
    const bool a_ok = std::isfinite(a.final_fidelity);
    const bool b_ok = std::isfinite(b.final_fidelity);
    if (a_ok != b_ok) return a_ok;
    if (a_ok && a.final_fidelity != b.final_fidelity) return a.final_fidelity > b.final_fidelity;
    return a.seed < b.seed;
  });
  return runs;
}

}  // namespace mqpulse
