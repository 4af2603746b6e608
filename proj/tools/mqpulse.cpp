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

// mqpulse command line: optimize, analyze, export.

#include <mqpulse/run.hpp>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <iostream>

using namespace mqpulse;

int main(int argc, char** argv) {
  CLI::App app{"Triple-quantum excitation pulse design for spin-3/2 under MAS"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);

  auto* optimize = app.add_subcommand("optimize", "Run multistart optimization from a config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_override;
  bool quiet = false;
  optimize->add_option("config", config_path, "JSON config file")->required();
  optimize->add_option("--seed", seed, "Override base_seed");
  optimize->add_option("--output", output_override, "Override output_dir");
  optimize->add_flag("-q,--quiet", quiet, "No progress output");

  auto* analyze = app.add_subcommand("analyze", "Quartiles, spectra and energy fractions");
  std::string run_dir;
  analyze->add_option("run-dir", run_dir, "Directory holding manifest.json")->required();

  auto* exporter = app.add_subcommand("export", "Convert a pulse file");
  std::string pulse_path, format = "csv", output_path;
  exporter->add_option("pulse", pulse_path, "pulse.csv from an optimize run")->required();
  exporter->add_option("--format", format, "csv or vendor")
      ->check(CLI::IsMember({"csv", "vendor"}));
  exporter->add_option("-o,--output", output_path, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*optimize) {
      RunConfig config = validate_config(read_text_file(config_path));
      if (seed) config.base_seed = *seed;
      if (!output_override.empty()) config.output_dir = output_override;
      ProgressLog log;
      if (!quiet) log = [](const std::string& line) { std::cerr << line << std::endl; };
      const RunManifest manifest = run_optimize(config, log);
      int failed = 0;
      for (const auto& r : manifest.runs) failed += r.failed ? 1 : 0;
      std::printf("%zu runs written to %s (%d failed, %.1f s)\n", manifest.runs.size(),
                  config.output_dir.c_str(), failed, manifest.total_seconds);
      return manifest.all_succeeded() ? 0 : 1;
    }
    if (*analyze) {
      for (const auto& path : run_analyze(run_dir)) std::printf("%s\n", path.c_str());
      return 0;
    }
    if (*exporter) {
      export_shape(pulse_path, format == "vendor" ? ExportFormat::Vendor : ExportFormat::Csv,
                   output_path);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
