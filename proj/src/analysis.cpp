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

#include <mqpulse/analysis.hpp>

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mqpulse {

PulseSpectrum pulse_spectrum(const PulseShape& pulse) {
  pulse.validate();
  const int n = pulse.n_steps();
  if (n < 2) throw std::invalid_argument("pulse_spectrum: need at least two steps");
  std::vector<cx> signal(n);
  for (int j = 0; j < n; ++j) signal[j] = cx(pulse.values(j, 0), pulse.values(j, 1));
  std::vector<cx> transform;
  Eigen::FFT<double> fft;
  fft.fwd(transform, signal);

  // bins k = -floor(N/2) ... ceil(N/2) - 1
  const int lowest = -(n / 2);
  PulseSpectrum s;
  s.frequencies.resize(n);
  s.magnitude.resize(n);
  const double bin = 1.0 / (n * pulse.dt);
  for (int i = 0; i < n; ++i) {
    const int k = lowest + i;
    const int index = k < 0 ? k + n : k;
    s.frequencies[i] = k * bin;
    s.magnitude[i] = std::abs(transform[index]) / n;
  }
  return s;
}

PulseSpectrum average_spectrum(std::span<const PulseShape> pulses) {
  if (pulses.empty()) throw std::invalid_argument("average_spectrum: no pulses");
  const int n = pulses.front().n_steps();
  const double dt = pulses.front().dt;
  PulseSpectrum mean = pulse_spectrum(pulses.front());
  for (std::size_t i = 1; i < pulses.size(); ++i) {
    if (pulses[i].n_steps() != n || pulses[i].dt != dt)
      throw std::invalid_argument("average_spectrum: pulses use different time grids");
    mean.magnitude += pulse_spectrum(pulses[i]).magnitude;
  }
  mean.magnitude /= static_cast<double>(pulses.size());
  return mean;
}

double spectral_energy_fraction(const PulseSpectrum& spectrum, double f_cut) {
  if (!(f_cut >= 0.0)) throw std::invalid_argument("spectral_energy_fraction: f_cut < 0");
  // grid frequencies are products k/(N dt) and carry rounding error
  const double limit = f_cut * (1.0 + 1e-12);
  double inside = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < spectrum.magnitude.size(); ++i) {
    const double e = spectrum.magnitude[i] * spectrum.magnitude[i];
    total += e;
    if (std::abs(spectrum.frequencies[i]) <= limit) inside += e;
  }
  return total > 0.0 ? inside / total : 1.0;
}

double basis_cutoff_frequency(int basis_size, double duration) {
  return (basis_size + 1) / (2.0 * duration);
}

QuartileSummary quartile_stats(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("quartile_stats: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  return QuartileSummary{sorted.front(), quantile(0.25), quantile(0.5), quantile(0.75),
                         sorted.back()};
}

LinearFit linear_fit_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit_r2: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("linear_fit_r2: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit_r2: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  return fit;
}

}  // namespace mqpulse
