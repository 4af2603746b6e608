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

#include <mqpulse/config.hpp>
#include <mqpulse/pulse_io.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mqpulse {

inline constexpr const char* kArtifactVersion = "mqpulse 0.1.0";

struct RunRecord {
  std::uint64_t seed = 0;
  ControlMode mode;
  double final_fidelity = 0.0;
  double final_cost = 1.0;
  int iterations = 0;
  int evaluations = 0;
  std::string stop_reason;
  bool failed = false;
  std::string message;
  // relative to the run directory
  std::string pulse_file;
  std::string coefficient_file;
  std::string history_file;
  double seconds = 0.0;
};

struct RunManifest {
  RunConfig config;
  std::string version = kArtifactVersion;
  std::string ensemble_file;
  std::vector<RunRecord> runs;
  double setup_seconds = 0.0;
  double total_seconds = 0.0;

  bool all_succeeded() const;
};

inline constexpr const char* kManifestName = "manifest.json";

std::string manifest_to_text(const RunManifest& manifest);
RunManifest manifest_from_text(const std::string& text);
RunManifest load_manifest(const std::filesystem::path& run_dir);

/// Per-run subdirectory, e.g. runs/group_M50_seed7.
std::string run_directory_name(const ControlMode& mode, std::uint64_t seed);

using ProgressLog = std::function<void(const std::string&)>;

/// Builds the ensemble, runs every start of every mode, writes pulses,
/// coefficients, histories and the manifest under config.output_dir.
/// The manifest is checkpointed every 10 completed runs.
RunManifest run_optimize(const RunConfig& config, const ProgressLog& log = {});

/// Writes analysis/quartiles.tsv, analysis/spectrum_<label>.tsv and
/// analysis/energy_fraction.tsv; returns the written paths.
std::vector<std::filesystem::path> run_analyze(const std::filesystem::path& run_dir);

enum class ExportFormat { Csv, Vendor };

/// csv: time_s,ux_hz,uy_hz at 12 significant digits; vendor: amplitude
/// percent and phase degrees.
void export_shape(const std::filesystem::path& pulse_file, ExportFormat format,
                  const std::filesystem::path& output);

}  // namespace mqpulse
