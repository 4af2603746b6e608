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

#include <mqpulse/powder.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mqpulse {

namespace {

using Vec3 = Eigen::Vector3d;

Vec3 to_vector(const SpherePoint& p) {
  return {std::sin(p.beta) * std::cos(p.alpha),
          std::sin(p.beta) * std::sin(p.alpha), std::cos(p.beta)};
}

SpherePoint to_point(const Vec3& v) {
  SpherePoint p;
  p.beta = std::acos(std::clamp(v.z(), -1.0, 1.0));
  double alpha = std::atan2(v.y(), v.x());
  if (alpha < 0.0) alpha += kTwoPi;
  if (alpha >= kTwoPi) alpha = 0.0;
  p.alpha = alpha;
  return p;
}

double potential(const std::vector<Vec3>& v) {
  double e = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) e += 1.0 / (v[i] - v[j]).norm();
  return e;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void PowderSpec::validate() const {
  if (n_alpha_beta < 1) throw std::invalid_argument("powder.n_alpha_beta must be >= 1");
  if (n_gamma < 1) throw std::invalid_argument("powder.n_gamma must be >= 1");
  if (rf_scales.empty()) throw std::invalid_argument("powder.rf_scales must be nonempty");
  for (double s : rf_scales)
    if (!(std::isfinite(s) && s > 0.0))
      throw std::invalid_argument("powder.rf_scales entries must be > 0");
  if (repulsion_iterations < 0)
    throw std::invalid_argument("powder.repulsion_iterations must be >= 0");
}

std::vector<SpherePoint> repulsion_orientations(int n, int iterations,
                                                std::uint64_t seed,
                                                const RepulsionObserver& observer) {
  if (n < 1) throw std::invalid_argument("repulsion_orientations: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> v(n);
  for (auto& p : v) {
    do {
      p = Vec3(normal(rng), normal(rng), normal(rng));
    } while (p.norm() < 1e-8);
    p.normalize();
  }

  const double step0 = 0.1 * std::pow(4.0 * std::numbers::pi / n, 1.5);
  double current = potential(v);
  if (observer) observer(0, current);
  std::vector<Vec3> force(n), trial(n);
  for (int it = 1; it <= iterations && n > 1; ++it) {
    for (int i = 0; i < n; ++i) {
      Vec3 f = Vec3::Zero();
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const Vec3 d = v[i] - v[j];
        const double r = d.norm();
        f += d / (r * r * r);
      }
      force[i] = f;
    }
    double step = step0 / (1.0 + (it - 1) / 100.0);
    bool moved = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (int i = 0; i < n; ++i) trial[i] = (v[i] + step * force[i]).normalized();
      const double e = potential(trial);
      if (e <= current) {
        v.swap(trial);
        current = e;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (observer) observer(it, current);
    if (!moved) break;
  }

  std::vector<SpherePoint> points(n);
  for (int i = 0; i < n; ++i) points[i] = to_point(v[i]);
  return points;
}

double repulsion_potential(const std::vector<SpherePoint>& points) {
  std::vector<Vec3> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(to_vector(p));
  return potential(v);
}

double min_chord_distance(const std::vector<SpherePoint>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, (to_vector(points[i]) - to_vector(points[j])).norm());
  return best;
}

Ensemble build_ensemble(const PowderSpec& spec, const SpinSystemParams& params,
                        std::uint64_t seed) {
  spec.validate();
  const auto pairs =
      repulsion_orientations(spec.n_alpha_beta, spec.repulsion_iterations, seed);
  const std::size_t total =
      pairs.size() * static_cast<std::size_t>(spec.n_gamma) * spec.rf_scales.size();
  const double weight = 1.0 / static_cast<double>(total);
  Ensemble ensemble;
  ensemble.reserve(total);
  for (const auto& ab : pairs) {
    for (int k = 0; k < spec.n_gamma; ++k) {
      const double gamma = k * kTwoPi / spec.n_gamma;
      for (double scale : spec.rf_scales) {
        EnsembleMember member;
        member.orient = Orientation{ab.alpha, ab.beta, gamma};
        member.rf_scale = scale;
        member.params = params;
        member.weight = weight;
        ensemble.push_back(member);
      }
    }
  }
  return ensemble;
}

std::string serialize_ensemble(const Ensemble& ensemble) {
  std::ostringstream out;
  out << "{\n  \"members\": [\n";
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& m = ensemble[i];
    const auto& p = m.params;
    out << "    {\"alpha\": " << fmt17(m.orient.alpha)
        << ", \"beta\": " << fmt17(m.orient.beta)
        << ", \"gamma\": " << fmt17(m.orient.gamma)
        << ", \"rf_scale\": " << fmt17(m.rf_scale)
        << ", \"weight\": " << fmt17(m.weight)
        << ", \"spin\": " << fmt17(p.quad.spin.value())
        << ", \"cq_hz\": " << fmt17(p.quad.cq_hz)
        << ", \"eta\": " << fmt17(p.quad.eta)
        << ", \"larmor_hz\": " << fmt17(p.larmor_hz)
        << ", \"shift_ppm\": " << fmt17(p.shift_ppm)
        << ", \"rotor_hz\": " << fmt17(p.rotor_hz)
        << ", \"second_order\": " << (p.second_order ? "true" : "false") << "}"
        << (i + 1 < ensemble.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

Ensemble deserialize_ensemble(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  Ensemble ensemble;
  for (const auto& j : doc.at("members")) {
    EnsembleMember m;
    m.orient = Orientation{j.at("alpha").get<double>(), j.at("beta").get<double>(),
                           j.at("gamma").get<double>()};
    m.rf_scale = j.at("rf_scale").get<double>();
    m.weight = j.at("weight").get<double>();
    m.params.quad.spin = SpinQuantumNumber::from_double(j.at("spin").get<double>());
    m.params.quad.cq_hz = j.at("cq_hz").get<double>();
    m.params.quad.eta = j.at("eta").get<double>();
    m.params.larmor_hz = j.at("larmor_hz").get<double>();
    m.params.shift_ppm = j.at("shift_ppm").get<double>();
    m.params.rotor_hz = j.at("rotor_hz").get<double>();
    m.params.second_order = j.at("second_order").get<bool>();
    ensemble.push_back(m);
  }
  return ensemble;
}

}  // namespace mqpulse
