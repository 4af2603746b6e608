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

// Acceptance suite: one PASS/FAIL line per criterion. Criteria 6, 7, 8 and
// 10 need full desk-scale multistart runs; finished run directories under
// --work-dir are reused when their configuration matches.

#include <mqpulse/analysis.hpp>
#include <mqpulse/group_basis.hpp>
#include <mqpulse/objective.hpp>
#include <mqpulse/run.hpp>

#include <CLI11.hpp>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace mqpulse;
namespace fs = std::filesystem;

namespace {

const SpinQuantumNumber kSpin(3);

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

EnsembleMember rbclo4_member(double alpha, double beta, double gamma, double rf) {
  EnsembleMember m;
  m.params = RunConfig::default_spin_system();
  m.orient = {alpha, beta, gamma};
  m.rf_scale = rf;
  return m;
}

EnsembleMember random_member(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return rbclo4_member(kTwoPi * u(rng), std::acos(1.0 - 2.0 * u(rng)), kTwoPi * u(rng),
                      0.95 + 0.1 * u(rng));
}

PulseShape random_pulse(int n, double dt, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PulseShape p;
  p.dt = dt;
  p.values.resize(n, 2);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < 2; ++k) p.values(j, k) = amplitude * u(rng);
  return p;
}

// Central differences of a scalar function of one coordinate over a step
// sweep, three- and five-point stencils. Returns every estimate.
std::vector<double> fd_sweep(const std::function<double(double)>& f) {
  std::vector<double> out;
  for (double h : {1e3, 1e2, 1e1}) {
    const double d1 = f(h) - f(-h), d2 = f(2 * h) - f(-2 * h);
    out.push_back(d1 / (2 * h));
    out.push_back((8 * d1 - d2) / (12 * h));
  }
  return out;
}

double best_relative(const std::vector<double>& estimates, double analytic) {
  double best = INFINITY;
  for (double e : estimates) best = std::min(best, std::abs(e - analytic) / std::abs(analytic));
  return best;
}

// Spread of the estimates around the analytic value at the two smallest
// steps; a plateau keeps this small.
double plateau_spread(const std::vector<double>& estimates, double analytic) {
  double worst = 0.0;
  for (std::size_t i = 2; i < estimates.size(); ++i)
    worst = std::max(worst, std::abs(estimates[i] - analytic) / std::abs(analytic));
  return worst;
}

Verdict criterion1() {
  std::mt19937_64 rng(1001);
  double worst = 0.0, worst_plateau = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const EnsembleMember m = random_member(rng);
    const PulseShape p = random_pulse(32, 1e-7, kTwoPi * 3e5, rng);
    const CostReport r = member_cost_gradient(p, m, Normalization{});
    for (int j = 0; j < 32; ++j)
      for (int k = 0; k < 2; ++k) {
        const auto est = fd_sweep([&](double h) {
          PulseShape q = p;
          q.values(j, k) += h;
          return member_cost_gradient(q, m, Normalization{}).cost;
        });
        worst = std::max(worst, best_relative(est, r.gradient(j, k)));
        worst_plateau = std::max(worst_plateau, plateau_spread(est, r.gradient(j, k)));
      }
  }
  return {worst < 1e-6, "20 instances x 64 entries, worst relative error " + fmt(worst) +
                            " (spread over h in {1e2, 1e1}: " + fmt(worst_plateau) + ")"};
}

Verdict criterion2() {
  std::mt19937_64 rng(2002);
  const int n = 128;
  const double dt = 1e-7;
  std::string detail;
  double overall = 0.0;
  for (int basis : {4, 16, 64}) {
    const ResponseMatrix resp = fourier_response(basis, n, dt);
    const EnsembleMember m = random_member(rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ChannelArray c(basis, 2);
    for (int i = 0; i < basis; ++i)
      for (int k = 0; k < 2; ++k) c(i, k) = kTwoPi * 3e5 / std::sqrt(basis) * u(rng);
    const CostReport r = member_cost_gradient(expand(c, resp, dt), m, Normalization{});
    const ChannelArray g = project_gradient(r.gradient, resp);
    double worst = 0.0;
    for (int i = 0; i < basis; ++i)
      for (int k = 0; k < 2; ++k) {
        const auto est = fd_sweep([&](double h) {
          ChannelArray d = c;
          d(i, k) += h;
          return member_cost_gradient(expand(d, resp, dt), m, Normalization{}).cost;
        });
        worst = std::max(worst, best_relative(est, g(i, k)));
      }
    overall = std::max(overall, worst);
    detail += (detail.empty() ? "" : ", ") + std::string("M=") + std::to_string(basis) + ": " +
              fmt(worst);
  }
  return {overall < 1e-6, "worst relative error " + detail};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  return linear_fit_r2(x, y).slope;
}

Verdict criterion3() {
  const SpinOperators ops = angular_momentum_operators(kSpin);
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double slope_lo = INFINITY, slope_hi = -INFINITY, worst6 = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const EnsembleMember m = random_member(rng);
    const double t = u(rng) / m.params.rotor_hz;
    const CMatrix h = total_hamiltonian(drift_hamiltonian(m.params, m.orient, ops, t),
                                        kTwoPi * 1e5 * (2 * u(rng) - 1),
                                        kTwoPi * 1e5 * (2 * u(rng) - 1), ops);
    const CMatrix& control = trial % 2 ? ops.iy : ops.ix;
    std::vector<double> lx, ly;
    for (int k = 0; k <= 8; ++k) {
      const double dt = 1e-9 * std::pow(10.0, k / 4.0);
      const auto s = step_propagator(h, dt);
      const CMatrix exact = s.propagator * propagator_derivative(s, control, dt);
      const CMatrix first = commutator_series_derivative(h, control, dt, 1);
      lx.push_back(std::log(dt));
      ly.push_back(std::log((first - exact).norm() / exact.norm()));
    }
    const double slope = fit_slope(lx, ly);
    slope_lo = std::min(slope_lo, slope);
    slope_hi = std::max(slope_hi, slope);
    const auto s = step_propagator(h, 1e-9);
    const CMatrix exact = s.propagator * propagator_derivative(s, control, 1e-9);
    const CMatrix sixth = commutator_series_derivative(h, control, 1e-9, 6);
    worst6 = std::max(worst6, (sixth - exact).norm() / exact.norm());
  }
  const bool pass = std::abs(slope_lo - 2.0) <= 0.1 && std::abs(slope_hi - 2.0) <= 0.1 &&
                    worst6 < 1e-10;
  return {pass, "first-order slope in [" + fmt(slope_lo) + ", " + fmt(slope_hi) +
                    "], order-6 relative error at 1 ns " + fmt(worst6)};
}

Verdict criterion4() {
  const SpinOperators ops = angular_momentum_operators(kSpin);
  const CMatrix eye = CMatrix::Identity(4, 4);
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double unitarity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const EnsembleMember m = random_member(rng);
    const CMatrix h = total_hamiltonian(
        drift_hamiltonian(m.params, m.orient, ops, u(rng) / m.params.rotor_hz),
        kTwoPi * 3e5 * (2 * u(rng) - 1), kTwoPi * 3e5 * (2 * u(rng) - 1), ops);
    const CMatrix uu = step_propagator(h, 1e-7).propagator;
    unitarity = std::max(unitarity, (uu.adjoint() * uu - eye).cwiseAbs().maxCoeff());
  }

  double trace = 0.0, hermitian = 0.0;
  {
    const EnsembleMember m = random_member(rng);
    const PulseShape p = random_pulse(1000, 1e-7, kTwoPi * 3e5, rng);
    const InitialState rho0 = thermal_state(kSpin);
    const Trajectory tr = evolve(p, m, rho0, three_quantum_target(kSpin));
    const cx t0 = rho0.matrix.trace();
    const double p0 = (rho0.matrix * rho0.matrix).trace().real();
    for (const auto& rho : tr.forward) {
      trace = std::max(trace, std::abs(rho.trace() - t0));
      trace = std::max(trace, std::abs((rho * rho).trace().real() - p0) / p0);
      hermitian = std::max(hermitian, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    }
  }

  double periodicity = 0.0;
  for (int i = 0; i < 200; ++i) {
    const EnsembleMember m = random_member(rng);
    const double period = 1.0 / m.params.rotor_hz;
    const double t = u(rng) * period;
    const CMatrix h0 = drift_hamiltonian(m.params, m.orient, ops, t);
    for (int n = 1; n <= 5; ++n) {
      const CMatrix hn = drift_hamiltonian(m.params, m.orient, ops, t + n * period);
      periodicity = std::max(periodicity, (hn - h0).norm() / h0.norm());
    }
  }

  double selection = 0.0;
  for (int i = 0; i < 50; ++i) {
    EnsembleMember m = random_member(rng);
    m.params.quad.cq_hz = 0.0;
    m.params.shift_ppm = 20.0 * (2 * u(rng) - 1);
    const PulseShape p = random_pulse(200, 1e-7, kTwoPi * 3e5, rng);
    selection = std::max(selection, member_cost_gradient(p, m, Normalization{}).fidelity);
  }

  const bool pass = unitarity < 1e-12 && trace < 1e-12 && hermitian < 1e-12 &&
                    periodicity < 1e-12 && selection < 1e-10;
  return {pass, "unitarity " + fmt(unitarity) + ", trace/purity drift " + fmt(trace) +
                    ", hermiticity " + fmt(hermitian) + ", rotor periodicity " +
                    fmt(periodicity) + ", max F at C_Q = 0 " + fmt(selection)};
}

Verdict criterion5() {
  const InitialState rho0 = thermal_state(kSpin);
  const TargetOperator target = three_quantum_target(kSpin);
  const Normalization norm = default_normalization(rho0);
  std::mt19937_64 rng(5005);
  std::normal_distribution<double> g;
  double largest = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CMatrix z(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) z(r, c) = cx(g(rng), g(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < 4; ++c) q.col(c) *= std::polar(1.0, std::arg(rr(c, c)));
    largest = std::max(largest, fidelity(q * rho0.matrix * q.adjoint(), target, norm));
  }
  // Hadamard on the m = +3/2, -3/2 pair turns Iz's outer block into 3Q coherence.
  CMatrix w = CMatrix::Identity(4, 4);
  w(0, 0) = w(0, 3) = w(3, 0) = 1.0 / std::sqrt(2.0);
  w(3, 3) = -1.0 / std::sqrt(2.0);
  const double witness = fidelity(w * rho0.matrix * w.adjoint(), target, norm);
  const bool pass = std::abs(norm.n_factor - 2.25) < 1e-15 && largest <= 1.0 + 1e-10 &&
                    witness > 1.0 - 1e-10;
  return {pass, "N = " + fmt(norm.n_factor) + ", max F over 1e4 unitaries " + fmt(largest) +
                    ", witness F " + std::to_string(witness)};
}

Verdict criterion9() {
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (double sigma : {0.05, 0.2, 0.35, 0.6}) {
    std::vector<double> x(10000), y(10000);
    for (int i = 0; i < 10000; ++i) {
      x[i] = u(rng);
      y[i] = 2.0 * x[i] - 0.5 + sigma * g(rng);
    }
    const double expected = (4.0 / 12.0) / (4.0 / 12.0 + sigma * sigma);
    worst = std::max(worst, std::abs(linear_fit_r2(x, y).r_squared - expected));
  }
  return {worst < 0.05,
          "experimental figures declared out of scope; synthetic R^2 worst deviation " +
              fmt(worst)};
}

// ---- desk-scale runs ----

RunConfig grape_config(const fs::path& dir) {
  RunConfig c;
  c.grape = true;
  c.n_starts = 20;
  c.base_seed = 1;
  c.output_dir = dir.string();
  return c;
}

RunConfig group_config(const fs::path& dir) {
  RunConfig c;
  c.grape = false;
  c.group_basis_sizes = {10, 50, 100, 200};
  c.n_starts = 10;
  c.base_seed = 1;
  c.output_dir = dir.string();
  return c;
}

RunManifest ensure_run(const RunConfig& config, bool allow_run) {
  const fs::path dir = config.output_dir;
  if (fs::exists(dir / kManifestName)) {
    RunManifest m = load_manifest(dir);
    RunConfig stored = m.config;
    stored.output_dir = config.output_dir;
    const std::size_t expected = config.modes().size() * config.n_starts;
    if (stored == config && m.runs.size() == expected) {
      std::cerr << "reusing " << dir.string() << "\n";
      return m;
    }
  }
  if (!allow_run) throw std::runtime_error("no finished run at " + dir.string());
  std::cerr << "running " << dir.string() << "\n";
  return run_optimize(config, [](const std::string& s) { std::cerr << "  " << s << "\n"; });
}

std::vector<double> fidelities(const RunManifest& m, const ControlMode& mode) {
  std::vector<double> out;
  for (const auto& r : m.runs)
    if (r.mode == mode && !r.failed && std::isfinite(r.final_fidelity))
      out.push_back(r.final_fidelity);
  return out;
}

int failures(const RunManifest& m) {
  int n = 0;
  for (const auto& r : m.runs) n += r.failed;
  return n;
}

struct DeskScale {
  fs::path work;
  bool allow_run = true;
  std::optional<RunManifest> grape, group, repeat;

  const RunManifest& grape_run() {
    if (!grape) grape = ensure_run(grape_config(work / "grape"), allow_run);
    return *grape;
  }
  const RunManifest& group_run() {
    if (!group) group = ensure_run(group_config(work / "group"), allow_run);
    return *group;
  }
  const RunManifest& repeat_run() {
    if (!repeat) repeat = ensure_run(grape_config(work / "grape_repeat"), allow_run);
    return *repeat;
  }
};

Verdict criterion6(DeskScale& desk) {
  const RunManifest& m = desk.grape_run();
  const auto f = fidelities(m, ControlMode::grape());
  if (f.empty()) return {false, "no successful GRAPE runs"};
  const QuartileSummary q = quartile_stats(f);
  const bool pass = failures(m) == 0 && q.median >= 0.50 && q.median <= 0.70;
  return {pass, std::to_string(f.size()) + " GRAPE runs, median E[F] " + fmt(q.median) +
                    " (quartiles " + fmt(q.q25) + " / " + fmt(q.q75) + ", range " +
                    fmt(q.min) + " - " + fmt(q.max) + "), required [0.50, 0.70]"};
}

Verdict criterion7(DeskScale& desk) {
  const RunManifest& m = desk.group_run();
  const auto grape = fidelities(desk.grape_run(), ControlMode::grape());
  std::map<int, double> median;
  std::string detail;
  for (int size : {10, 50, 100, 200}) {
    const auto f = fidelities(m, ControlMode::group(size));
    if (f.empty()) return {false, "no successful GROUP runs at M=" + std::to_string(size)};
    median[size] = quartile_stats(f).median;
    detail += "M=" + std::to_string(size) + ": " + fmt(median[size]) + ", ";
  }
  if (grape.empty()) return {false, "no successful GRAPE runs"};
  const double grape_median = quartile_stats(grape).median;
  const bool pass = failures(m) == 0 && median[200] - median[10] >= 0.1 &&
                    std::abs(median[200] - grape_median) <= 0.05;
  return {pass, "medians " + detail + "GRAPE: " + fmt(grape_median) +
                    "; need M=200 - M=10 >= 0.1 and |M=200 - GRAPE| <= 0.05"};
}

Verdict criterion8(DeskScale& desk) {
  const RunManifest& group = desk.group_run();
  const RunConfig& c = group.config;
  const double duration = c.n_steps * c.dt_s;
  const fs::path group_dir = desk.work / "group";
  double worst = 1.0;
  std::map<int, double> worst_by_size;
  int counted = 0;
  for (const auto& r : group.runs) {
    if (r.failed || r.pulse_file.empty()) continue;
    const PulseSpectrum s = pulse_spectrum(read_pulse_csv(group_dir / r.pulse_file));
    const double guarded = basis_cutoff_frequency(r.mode.basis_size, duration) + 1.0 / duration;
    const double e = spectral_energy_fraction(s, guarded);
    worst = std::min(worst, e);
    auto [it, fresh] = worst_by_size.emplace(r.mode.basis_size, e);
    if (!fresh) it->second = std::min(it->second, e);
    ++counted;
  }
  const RunManifest& grape = desk.grape_run();
  std::vector<PulseShape> pulses;
  for (const auto& r : grape.runs)
    if (!r.failed && !r.pulse_file.empty())
      pulses.push_back(read_pulse_csv(desk.work / "grape" / r.pulse_file));
  if (pulses.empty() || counted == 0) return {false, "missing pulses"};
  const double above =
      1.0 - spectral_energy_fraction(average_spectrum(pulses),
                                     basis_cutoff_frequency(200, grape.config.n_steps *
                                                                     grape.config.dt_s));
  std::string detail = "minimum GROUP in-band fraction ";
  for (const auto& [size, e] : worst_by_size)
    detail += "M=" + std::to_string(size) + ": " + std::to_string(e) + ", ";
  detail += "required >= 0.999; GRAPE average energy above the M=200 cutoff " + fmt(above) +
            " (required > 0.05)";
  return {worst >= 0.999 && above > 0.05, detail};
}

Verdict criterion10(DeskScale& desk) {
  const RunManifest& a = desk.grape_run();
  const RunManifest& b = desk.repeat_run();
  if (a.runs.size() != b.runs.size()) return {false, "run counts differ"};
  int identical = 0;
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    const double x = a.runs[i].final_fidelity, y = b.runs[i].final_fidelity;
    if (a.runs[i].seed == b.runs[i].seed && std::memcmp(&x, &y, sizeof x) == 0) ++identical;
  }
  return {identical == static_cast<int>(a.runs.size()),
          std::to_string(identical) + " of " + std::to_string(a.runs.size()) +
              " final fidelities bitwise identical across two GRAPE runs with base_seed 1"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mqpulse acceptance suite"};
  std::string work = "acceptance_runs";
  std::vector<int> only;
  bool no_run = false;
  app.add_option("--work-dir", work, "Directory for the desk-scale runs");
  app.add_option("--only", only, "Criteria to evaluate (default: all)");
  app.add_flag("--no-run", no_run, "Fail instead of launching missing desk-scale runs");
  CLI11_PARSE(app, argc, argv);

  DeskScale desk{fs::path(work), !no_run, {}, {}, {}};
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, criterion5},
      {6, [&] { return criterion6(desk); }},
      {7, [&] { return criterion7(desk); }},
      {8, [&] { return criterion8(desk); }},
      {9, criterion9},
      {10, [&] { return criterion10(desk); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
              << " [" << fmt(seconds) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
