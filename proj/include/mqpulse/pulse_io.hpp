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

#include <filesystem>
#include <string>
#include <vector>

namespace mqpulse {

/// Pulse files store nutation frequencies in Hz (u / 2pi):
///
///   # n_steps=<N> dt_s=<dt>
///   time_s,ux_hz,uy_hz
///   <j dt>,<ux>,<uy>
///
/// Values are read back as rad/s.
void write_pulse_csv(const std::filesystem::path& path, const PulseShape& pulse,
                     int significant_digits = 17);
PulseShape read_pulse_csv(const std::filesystem::path& path);

/// Two columns, amplitude in percent of the maximum and phase in degrees
/// in [0, 360), after a comment header with N, dt and the maximum
/// nutation frequency. Zero-amplitude steps are written as "0.0 0.0".
std::string vendor_shape_text(const PulseShape& pulse);

/// GROUP coefficients, one row per basis function: m,cx_hz,cy_hz
void write_coefficients_csv(const std::filesystem::path& path, const ChannelArray& coefficients);
ChannelArray read_coefficients_csv(const std::filesystem::path& path);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mqpulse
