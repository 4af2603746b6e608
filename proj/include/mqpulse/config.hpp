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

#include <mqpulse/optimizer.hpp>
#include <mqpulse/powder.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqpulse {

/// Parse or range error; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  SpinSystemParams spin_system = default_spin_system();
  int n_steps = 1331;
  double dt_s = 1e-7;
  PowderSpec powder;
  std::uint64_t powder_seed = 1;
  bool grape = true;
  std::vector<int> group_basis_sizes;
  OptimizerOptions optimizer;
  double init_scale_hz = 20e3;
  int n_starts = 1;
  std::uint64_t base_seed = 1;
  std::string output_dir = "runs";

  /// 87Rb in RbClO4 at 9.4 T under 30 kHz MAS.
  static SpinSystemParams default_spin_system();

  std::vector<ControlMode> modes() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses JSON config text, fills defaults and range-checks every field.
/// Unknown keys are errors.
RunConfig validate_config(const std::string& text);

/// Normalised JSON with every field present.
std::string config_to_text(const RunConfig& config);

}  // namespace mqpulse
