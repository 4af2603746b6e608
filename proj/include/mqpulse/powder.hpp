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

#include <mqpulse/mas_hamiltonian.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mqpulse {

struct EnsembleMember {
  Orientation orient;
  double rf_scale = 1.0;
  SpinSystemParams params;
  double weight = 1.0;
};

using Ensemble = std::vector<EnsembleMember>;

struct PowderSpec {
  int n_alpha_beta = 50;
  int n_gamma = 3;
  std::vector<double> rf_scales{0.95, 1.00, 1.05};
  int repulsion_iterations = 2000;

  void validate() const;

  friend bool operator==(const PowderSpec&, const PowderSpec&) = default;
};

struct SpherePoint {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Called after each relaxation sweep with the iteration index and the
/// Coulomb-like potential sum_{i<j} 1/|v_i - v_j| of the current points.
using RepulsionObserver = std::function<void(int iteration, double potential)>;

/// Quasi-uniform points on the unit sphere by mutual repulsion.
///
/// Points start at seeded uniformly random positions. Each sweep moves
/// every point along sum_{j != i} (v_i - v_j) / |v_i - v_j|^3 with a step
/// that decays as 1 / (1 + iteration / 100), then projects back onto the
/// sphere. A sweep that would raise the potential is retried with half the
/// step, so the potential never increases.
std::vector<SpherePoint> repulsion_orientations(
    int n, int iterations, std::uint64_t seed,
    const RepulsionObserver& observer = {});

/// sum_{i<j} 1 / |v_i - v_j| over unit vectors of the given points.
double repulsion_potential(const std::vector<SpherePoint>& points);

/// Smallest pairwise chord distance.
double min_chord_distance(const std::vector<SpherePoint>& points);

/// n_alpha_beta x n_gamma x |rf_scales| members with uniform weights.
/// Ordering: (alpha, beta) outermost, then gamma, then rf scale.
Ensemble build_ensemble(const PowderSpec& spec, const SpinSystemParams& params,
                        std::uint64_t seed);

/// JSON text with angles written at 17 significant digits.
std::string serialize_ensemble(const Ensemble& ensemble);
Ensemble deserialize_ensemble(const std::string& text);

}  // namespace mqpulse
