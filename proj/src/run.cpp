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

#include <mqpulse/run.hpp>

#include <mqpulse/analysis.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mqpulse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string format_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
  write_text_file(dir / kManifestName, manifest_to_text(manifest));
}

}  // namespace

bool RunManifest::all_succeeded() const {
  for (const auto& r : runs)
    if (r.failed) return false;
  return true;
}

std::string manifest_to_text(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["config"] = json::parse(config_to_text(m.config));
  j["ensemble_file"] = m.ensemble_file;
  json runs = json::array();
  for (const auto& r : m.runs) {
    runs.push_back({{"seed", r.seed},
                    {"mode", r.mode.is_group() ? "group" : "grape"},
                    {"basis_size", r.mode.basis_size},
                    {"final_fidelity", number_or_null(r.final_fidelity)},
                    {"final_cost", number_or_null(r.final_cost)},
                    {"iterations", r.iterations},
                    {"evaluations", r.evaluations},
                    {"stop_reason", r.stop_reason},
                    {"failed", r.failed},
                    {"message", r.message},
                    {"pulse_file", r.pulse_file},
                    {"coefficient_file", r.coefficient_file},
                    {"history_file", r.history_file},
                    {"seconds", r.seconds}});
  }
  j["runs"] = runs;
  j["timings"] = {{"setup_seconds", m.setup_seconds}, {"total_seconds", m.total_seconds}};
  return j.dump(2) + "\n";
}

RunManifest manifest_from_text(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.version = j.at("version").get<std::string>();
    m.config = validate_config(j.at("config").dump());
    m.ensemble_file = j.at("ensemble_file").get<std::string>();
    for (const auto& r : j.at("runs")) {
      RunRecord rec;
      rec.seed = r.at("seed").get<std::uint64_t>();
      const std::string mode = r.at("mode").get<std::string>();
      if (mode == "group")
        rec.mode = ControlMode::group(r.at("basis_size").get<int>());
      else if (mode == "grape")
        rec.mode = ControlMode::grape();
      else
        throw std::runtime_error("unknown mode '" + mode + "'");
      rec.final_fidelity = number_from(r.at("final_fidelity"));
      rec.final_cost = number_from(r.at("final_cost"));
      rec.iterations = r.at("iterations").get<int>();
      rec.evaluations = r.at("evaluations").get<int>();
      rec.stop_reason = r.at("stop_reason").get<std::string>();
      rec.failed = r.at("failed").get<bool>();
      rec.message = r.at("message").get<std::string>();
      rec.pulse_file = r.at("pulse_file").get<std::string>();
      rec.coefficient_file = r.at("coefficient_file").get<std::string>();
      rec.history_file = r.at("history_file").get<std::string>();
      rec.seconds = r.at("seconds").get<double>();
      m.runs.push_back(rec);
    }
    m.setup_seconds = j.at("timings").at("setup_seconds").get<double>();
    m.total_seconds = j.at("timings").at("total_seconds").get<double>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("corrupt manifest: ") + e.what());
  }
  return m;
}

RunManifest load_manifest(const fs::path& run_dir) {
  const fs::path path = run_dir / kManifestName;
  if (!fs::exists(path)) throw std::runtime_error("no manifest at " + path.string());
  return manifest_from_text(read_text_file(path));
}

std::string run_directory_name(const ControlMode& mode, std::uint64_t seed) {
  return mode.label() + "_seed" + std::to_string(seed);
}

RunManifest run_optimize(const RunConfig& config, const ProgressLog& log) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path out = config.output_dir;
  fs::create_directories(out);

  RunManifest manifest;
  manifest.config = config;
  write_text_file(out / "config.json", config_to_text(config));

  const Ensemble ensemble =
      build_ensemble(config.powder, config.spin_system, config.powder_seed);
  manifest.ensemble_file = "ensemble.json";
  write_text_file(out / manifest.ensemble_file, serialize_ensemble(ensemble));
  const auto objective = std::make_shared<const EnsembleObjective>(
      ensemble, config.n_steps, config.dt_s,
      default_normalization(thermal_state(config.spin_system.quad.spin)));
  manifest.setup_seconds = seconds_since(start);
  if (log)
    log("ensemble: " + std::to_string(ensemble.size()) + " members, setup " +
        format_g(manifest.setup_seconds) + " s");

  const double init_scale = kTwoPi * config.init_scale_hz;
  for (const ControlMode& mode : config.modes()) {
    const PulseProblem problem(objective, mode, init_scale);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < config.n_starts; ++i) {
      const auto run_start = std::chrono::steady_clock::now();
      const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
      OptimizationRun run;
      try {
        run = optimize_pulse(problem, seed, config.optimizer);
      } catch (const std::exception& e) {
        run.seed = seed;
        run.mode = mode;
        run.failed = true;
        run.message = e.what();
        run.final_cost = std::numeric_limits<double>::quiet_NaN();
        run.final_fidelity = std::numeric_limits<double>::quiet_NaN();
      }
      RunRecord rec;
      rec.seed = seed;
      rec.mode = mode;
      rec.final_fidelity = run.final_fidelity;
      rec.final_cost = run.final_cost;
      rec.iterations = run.history.empty() ? 0 : static_cast<int>(run.history.size()) - 1;
      rec.evaluations = run.evaluations;
      rec.stop_reason = to_string(run.reason);
      rec.failed = run.failed;
      rec.message = run.message;
      rec.seconds = seconds_since(run_start);
#pragma omp critical(mqpulse_run_output)
      {
        try {
          const std::string sub = "runs/" + run_directory_name(mode, seed);
          if (run.pulse.n_steps() > 0) {
            rec.pulse_file = sub + "/pulse.csv";
            write_pulse_csv(out / rec.pulse_file, run.pulse);
          }
          if (mode.is_group() && run.coefficients.rows() > 0) {
            rec.coefficient_file = sub + "/coefficients.csv";
            write_coefficients_csv(out / rec.coefficient_file, run.coefficients);
          }
          rec.history_file = sub + "/history.csv";
          write_history_csv(out / rec.history_file, run.history);
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.message = std::string("output: ") + e.what();
        }
        manifest.runs.push_back(rec);
        if (log)
          log(mode.label() + " seed " + std::to_string(seed) + ": E[F] = " +
              format_g(rec.final_fidelity) + " after " + std::to_string(rec.iterations) +
              " iterations (" + rec.stop_reason + ", " + format_g(rec.seconds) + " s)");
        if (manifest.runs.size() % 10 == 0) {
          manifest.total_seconds = seconds_since(start);
          write_manifest(out, manifest);
        }
      }
    }
  }

  const auto modes = config.modes();
  auto mode_index = [&](const ControlMode& m) {
    return std::find(modes.begin(), modes.end(), m) - modes.begin();
  };
  std::stable_sort(manifest.runs.begin(), manifest.runs.end(),
                   [&](const RunRecord& a, const RunRecord& b) {
                     if (mode_index(a.mode) != mode_index(b.mode))
                       return mode_index(a.mode) < mode_index(b.mode);
                     return a.seed < b.seed;
                   });
  manifest.total_seconds = seconds_since(start);
  write_manifest(out, manifest);
  return manifest;
}

std::vector<fs::path> run_analyze(const fs::path& run_dir) {
  const RunManifest manifest = load_manifest(run_dir);
  const RunConfig& config = manifest.config;
  const fs::path dir = run_dir / "analysis";
  fs::create_directories(dir);
  std::vector<fs::path> written;

  struct Group {
    ControlMode mode;
    std::vector<double> fidelities;
    std::vector<PulseShape> pulses;
  };
  std::vector<Group> groups;
  for (const ControlMode& mode : config.modes()) {
    Group g{mode, {}, {}};
    for (const auto& r : manifest.runs) {
      if (!(r.mode == mode) || r.failed) continue;
      if (std::isfinite(r.final_fidelity)) g.fidelities.push_back(r.final_fidelity);
      if (!r.pulse_file.empty()) g.pulses.push_back(read_pulse_csv(run_dir / r.pulse_file));
    }
    groups.push_back(std::move(g));
  }

  std::ostringstream quartiles;
  quartiles << "mode\tbasis_size\tn_runs\tmin\tq25\tmedian\tq75\tmax\n";
  for (const auto& g : groups) {
    if (g.fidelities.empty()) continue;
    const QuartileSummary q = quartile_stats(g.fidelities);
    quartiles << (g.mode.is_group() ? "group" : "grape") << "\t" << g.mode.basis_size << "\t"
              << g.fidelities.size() << "\t" << format_g(q.min) << "\t" << format_g(q.q25)
              << "\t" << format_g(q.median) << "\t" << format_g(q.q75) << "\t"
              << format_g(q.max) << "\n";
  }
  written.push_back(dir / "quartiles.tsv");
  write_text_file(written.back(), quartiles.str());

  const double duration = config.n_steps * config.dt_s;
  const double bin = 1.0 / duration;
  std::vector<int> cutoffs = config.group_basis_sizes;
  std::sort(cutoffs.begin(), cutoffs.end());

  std::ostringstream fractions;
  fractions << "group\tcutoff_basis_size\tcutoff_hz\tguarded_cutoff_hz\t"
               "average_spectrum_fraction\tmin_pulse_fraction\n";
  for (const auto& g : groups) {
    if (g.pulses.empty()) continue;
    const PulseSpectrum avg = average_spectrum(g.pulses);
    std::ostringstream spectrum;
    spectrum << "frequency_hz\tmagnitude\n";
    for (Eigen::Index i = 0; i < avg.frequencies.size(); ++i)
      spectrum << format_g(avg.frequencies[i]) << "\t" << format_g(avg.magnitude[i]) << "\n";
    written.push_back(dir / ("spectrum_" + g.mode.label() + ".tsv"));
    write_text_file(written.back(), spectrum.str());

    std::vector<PulseSpectrum> individual;
    for (const auto& p : g.pulses) individual.push_back(pulse_spectrum(p));
    auto row = [&](int basis_size, double cutoff, double guarded) {
      double worst = 1.0;
      for (const auto& s : individual)
        worst = std::min(worst, spectral_energy_fraction(s, guarded));
      fractions << g.mode.label() << "\t" << basis_size << "\t" << format_g(cutoff) << "\t"
                << format_g(guarded) << "\t"
                << format_g(spectral_energy_fraction(avg, guarded)) << "\t" << format_g(worst)
                << "\n";
    };
    if (cutoffs.empty()) {
      const double nyquist = 0.5 / config.dt_s;
      row(0, nyquist, nyquist);
    }
    for (int m : cutoffs) {
      const double cutoff = basis_cutoff_frequency(m, duration);
      row(m, cutoff, cutoff + bin);
    }
  }
  written.push_back(dir / "energy_fraction.tsv");
  write_text_file(written.back(), fractions.str());
  return written;
}

void export_shape(const fs::path& pulse_file, ExportFormat format, const fs::path& output) {
  const PulseShape pulse = read_pulse_csv(pulse_file);
  if (format == ExportFormat::Csv)
    write_pulse_csv(output, pulse, 12);
  else
    write_text_file(output, vendor_shape_text(pulse));
}

}  // namespace mqpulse
