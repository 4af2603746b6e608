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

#include <mqpulse/pulse_io.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mqpulse {

namespace {

std::string format_g(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Fixed with six decimals, trailing zeros trimmed to one decimal.
std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  if (s == "-0.0") s = "0.0";
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \t\r", used) != std::string::npos)
      throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_pulse_csv(const std::filesystem::path& path, const PulseShape& pulse,
                     int significant_digits) {
  pulse.validate();
  std::ostringstream out;
  out << "# n_steps=" << pulse.n_steps() << " dt_s=" << format_g(pulse.dt, 17) << "\n";
  out << "time_s,ux_hz,uy_hz\n";
  for (int j = 0; j < pulse.n_steps(); ++j) {
    out << format_g(j * pulse.dt, significant_digits) << ","
        << format_g(pulse.values(j, 0) / kTwoPi, significant_digits) << ","
        << format_g(pulse.values(j, 1) / kTwoPi, significant_digits) << "\n";
  }
  write_text_file(path, out.str());
}

PulseShape read_pulse_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  double dt = 0.0;
  bool header_seen = false;
  std::vector<double> times, ux, uy;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("dt_s=");
      if (pos != std::string::npos) {
        std::string value = line.substr(pos + 5);
        value = value.substr(0, value.find(' '));
        dt = parse_double(value, path);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "time_s,ux_hz,uy_hz")
        throw std::runtime_error(path.string() + ": expected header time_s,ux_hz,uy_hz");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) throw std::runtime_error(path.string() + ": expected 3 columns");
    times.push_back(parse_double(fields[0], path));
    ux.push_back(parse_double(fields[1], path));
    uy.push_back(parse_double(fields[2], path));
  }
  if (ux.empty()) throw std::runtime_error(path.string() + ": no pulse rows");
  if (!(dt > 0.0)) {
    if (times.size() < 2) throw std::runtime_error(path.string() + ": cannot infer dt");
    dt = times[1] - times[0];
  }
  PulseShape pulse;
  pulse.dt = dt;
  pulse.values.resize(static_cast<Eigen::Index>(ux.size()), 2);
  for (std::size_t j = 0; j < ux.size(); ++j) {
    pulse.values(j, 0) = kTwoPi * ux[j];
    pulse.values(j, 1) = kTwoPi * uy[j];
  }
  pulse.validate();
  return pulse;
}

std::string vendor_shape_text(const PulseShape& pulse) {
  pulse.validate();
  const Eigen::VectorXd amplitude = pulse.values.rowwise().norm();
  const double peak = amplitude.maxCoeff();
  std::ostringstream out;
  out << "# N=" << pulse.n_steps() << "\n";
  out << "# dt_s=" << format_g(pulse.dt, 17) << "\n";
  out << "# max_nutation_hz=" << format_g(peak / kTwoPi, 12) << "\n";
  for (int j = 0; j < pulse.n_steps(); ++j) {
    double percent = 0.0;
    double phase = 0.0;
    if (peak > 0.0 && amplitude[j] > 0.0) {
      percent = 100.0 * amplitude[j] / peak;
      phase = std::atan2(pulse.values(j, 1), pulse.values(j, 0)) * 180.0 / std::numbers::pi;
      if (phase < 0.0) phase += 360.0;
      if (phase >= 360.0) phase -= 360.0;
    }
    out << format_short(percent) << " " << format_short(phase) << "\n";
  }
  return out.str();
}

void write_coefficients_csv(const std::filesystem::path& path,
                            const ChannelArray& coefficients) {
  std::ostringstream out;
  out << "m,cx_hz,cy_hz\n";
  for (Eigen::Index m = 0; m < coefficients.rows(); ++m)
    out << m << "," << format_g(coefficients(m, 0) / kTwoPi, 17) << ","
        << format_g(coefficients(m, 1) / kTwoPi, 17) << "\n";
  write_text_file(path, out.str());
}

ChannelArray read_coefficients_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<double> cx_, cy_;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3) throw std::runtime_error(path.string() + ": expected 3 columns");
    cx_.push_back(kTwoPi * parse_double(fields[1], path));
    cy_.push_back(kTwoPi * parse_double(fields[2], path));
  }
  ChannelArray c(static_cast<Eigen::Index>(cx_.size()), 2);
  for (std::size_t m = 0; m < cx_.size(); ++m) {
    c(m, 0) = cx_[m];
    c(m, 1) = cy_[m];
  }
  return c;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<IterationRecord>& history) {
  std::ostringstream out;
  out << "iteration,cost,gradient_norm,step_size\n";
  for (std::size_t k = 0; k < history.size(); ++k)
    out << k << "," << format_g(history[k].cost, 17) << ","
        << format_g(history[k].gradient_norm, 17) << "," << format_g(history[k].step_size, 17)
        << "\n";
  write_text_file(path, out.str());
}

}  // namespace mqpulse
