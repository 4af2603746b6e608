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

#include <mqpulse/propagation.hpp>

#include <span>
#include <vector>

namespace mqpulse {

struct PulseSpectrum {
  RVector frequencies;  // Hz, ascending, centred on zero
  RVector magnitude;    // |DFT(ux + i uy)| / N
};

struct QuartileSummary {
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Unwindowed DFT of ux + i uy with 1/N normalisation, shifted so that
/// zero frequency sits in the middle.
PulseSpectrum pulse_spectrum(const PulseShape& pulse);

/// Elementwise mean magnitude; all pulses must share N and dt.
PulseSpectrum average_spectrum(std::span<const PulseShape> pulses);

/// sum |S|^2 over |f| <= f_cut divided by sum |S|^2.
double spectral_energy_fraction(const PulseSpectrum& spectrum, double f_cut);

/// Highest frequency a sine basis of the given size can represent,
/// (M + 1) / (2T).
double basis_cutoff_frequency(int basis_size, double duration);

/// Quantiles by linear interpolation between order statistics.
QuartileSummary quartile_stats(std::span<const double> values);

/// Ordinary least squares y = slope x + intercept; R^2 = 1 - SS_res/SS_tot
/// (0 when y is constant).
LinearFit linear_fit_r2(std::span<const double> x, std::span<const double> y);

}  // namespace mqpulse
