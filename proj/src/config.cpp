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

#include <mqpulse/config.hpp>

#include <json.hpp>

#include <cmath>
#include <set>

namespace mqpulse {

namespace {

using nlohmann::json;

class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(where(), "expected an object");
  }

  bool has(const std::string& key) const { return object_.contains(key); }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = child(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
  }

  void read(const std::string& key, int& out) {
    if (const json* v = child(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      const auto value = v->get<long long>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
        throw ConfigError(field(key), "integer out of range");
      out = static_cast<int>(value);
    }
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = child(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = child(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = child(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename T>
  void read_list(const std::string& key, std::vector<T>& out) {
    if (const json* v = child(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected a list");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        const std::string at = field(key) + "[" + std::to_string(i) + "]";
        if constexpr (std::is_integral_v<T>) {
          if (!e.is_number_integer()) throw ConfigError(at, "expected an integer");
        } else {
          if (!e.is_number()) throw ConfigError(at, "expected a number");
        }
        out.push_back(e.get<T>());
      }
    }
  }

  void finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void read_spin_system(ObjectReader& parent, SpinSystemParams& p) {
  const json* node = parent.child("spin_system");
  if (!node) return;
  ObjectReader r(*node, "spin_system");
  double spin = p.quad.spin.value();
  r.read("spin", spin);
  r.read("cq_hz", p.quad.cq_hz);
  r.read("eta", p.quad.eta);
  r.read("larmor_hz", p.larmor_hz);
  r.read("shift_ppm", p.shift_ppm);
  r.read("rotor_hz", p.rotor_hz);
  r.read("second_order", p.second_order);
  r.finish();
  check(spin == 1.5, "spin_system.spin", "only spin 3/2 is supported");
  p.quad.spin = SpinQuantumNumber::from_double(spin);
  check(p.quad.cq_hz >= 0.0, "spin_system.cq_hz", "must be >= 0");
  check(p.quad.eta >= 0.0 && p.quad.eta <= 1.0, "spin_system.eta", "must lie in [0, 1]");
  check(p.larmor_hz > 0.0, "spin_system.larmor_hz", "must be > 0");
  check(p.rotor_hz >= 0.0, "spin_system.rotor_hz", "must be >= 0");
}

void read_pulse(ObjectReader& parent, RunConfig& c) {
  const json* node = parent.child("pulse");
  if (!node) return;
  ObjectReader r(*node, "pulse");
  r.read("n_steps", c.n_steps);
  r.read("dt_s", c.dt_s);
  r.finish();
  check(c.n_steps >= 2, "pulse.n_steps", "must be >= 2");
  check(c.dt_s > 0.0, "pulse.dt_s", "must be > 0");
}

void read_powder(ObjectReader& parent, RunConfig& c) {
  const json* node = parent.child("powder");
  if (!node) return;
  ObjectReader r(*node, "powder");
  r.read("n_alpha_beta", c.powder.n_alpha_beta);
  r.read("n_gamma", c.powder.n_gamma);
  r.read_list("rf_scales", c.powder.rf_scales);
  r.read("repulsion_iterations", c.powder.repulsion_iterations);
  r.read("seed", c.powder_seed);
  r.finish();
  check(c.powder.n_alpha_beta >= 1, "powder.n_alpha_beta", "must be >= 1");
  check(c.powder.n_gamma >= 1, "powder.n_gamma", "must be >= 1");
  check(!c.powder.rf_scales.empty(), "powder.rf_scales", "must not be empty");
  for (std::size_t i = 0; i < c.powder.rf_scales.size(); ++i)
    check(c.powder.rf_scales[i] > 0.0, "powder.rf_scales[" + std::to_string(i) + "]",
          "must be > 0");
  check(c.powder.repulsion_iterations >= 0, "powder.repulsion_iterations", "must be >= 0");
}

void read_modes(ObjectReader& parent, RunConfig& c) {
  const json* node = parent.child("modes");
  if (!node) return;
  ObjectReader r(*node, "modes");
  r.read("grape", c.grape);
  r.read_list("group_basis_sizes", c.group_basis_sizes);
  r.finish();
  for (std::size_t i = 0; i < c.group_basis_sizes.size(); ++i)
    check(c.group_basis_sizes[i] >= 1 && c.group_basis_sizes[i] <= c.n_steps,
          "modes.group_basis_sizes[" + std::to_string(i) + "]", "must lie in [1, n_steps]");
  std::set<int> unique(c.group_basis_sizes.begin(), c.group_basis_sizes.end());
  check(unique.size() == c.group_basis_sizes.size(), "modes.group_basis_sizes",
        "duplicate basis size");
  check(c.grape || !c.group_basis_sizes.empty(), "modes", "no optimization mode selected");
}

void read_optimizer(ObjectReader& parent, OptimizerOptions& o) {
  const json* node = parent.child("optimizer");
  if (!node) return;
  ObjectReader r(*node, "optimizer");
  r.read("max_iterations", o.max_iterations);
  r.read("gradient_tolerance", o.gradient_tolerance);
  r.read("cost_tolerance", o.cost_tolerance);
  r.read("memory", o.memory);
  r.read("penalty_weight", o.penalty_weight);
  if (const json* ls = r.child("line_search")) {
    ObjectReader l(*ls, "optimizer.line_search");
    l.read("sufficient_decrease", o.line_search.sufficient_decrease);
    l.read("curvature", o.line_search.curvature);
    l.read("max_evaluations", o.line_search.max_evaluations);
    l.finish();
  }
  r.finish();
  check(o.max_iterations >= 1, "optimizer.max_iterations", "must be >= 1");
  check(o.gradient_tolerance > 0.0, "optimizer.gradient_tolerance", "must be > 0");
  check(o.cost_tolerance > 0.0, "optimizer.cost_tolerance", "must be > 0");
  check(o.memory >= 1, "optimizer.memory", "must be >= 1");
  check(o.penalty_weight >= 0.0, "optimizer.penalty_weight", "must be >= 0");
  check(o.line_search.sufficient_decrease > 0.0 &&
            o.line_search.sufficient_decrease < o.line_search.curvature,
        "optimizer.line_search.sufficient_decrease", "must lie in (0, curvature)");
  check(o.line_search.curvature < 1.0, "optimizer.line_search.curvature", "must be < 1");
  check(o.line_search.max_evaluations >= 1, "optimizer.line_search.max_evaluations",
        "must be >= 1");
}

}  // namespace

SpinSystemParams RunConfig::default_spin_system() {
  SpinSystemParams p;
  p.quad.cq_hz = 3.2e6;
  p.quad.eta = 0.2;
  p.quad.spin = SpinQuantumNumber(3);
  p.larmor_hz = 130.9e6;
  p.shift_ppm = 0.0;
  p.rotor_hz = 30e3;
  return p;
}

std::vector<ControlMode> RunConfig::modes() const {
  std::vector<ControlMode> out;
  if (grape) out.push_back(ControlMode::grape());
  for (int m : group_basis_sizes) out.push_back(ControlMode::group(m));
  return out;
}

RunConfig validate_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("parse error: ") + e.what());
  }
  RunConfig c;
  ObjectReader root(doc, "");
  read_spin_system(root, c.spin_system);
  read_pulse(root, c);
  read_powder(root, c);
  read_modes(root, c);
  read_optimizer(root, c.optimizer);
  root.read("init_scale_hz", c.init_scale_hz);
  root.read("n_starts", c.n_starts);
  root.read("base_seed", c.base_seed);
  root.read("output_dir", c.output_dir);
  root.finish();
  check(c.init_scale_hz > 0.0, "init_scale_hz", "must be > 0");
  check(c.n_starts >= 1, "n_starts", "must be >= 1");
  check(!c.output_dir.empty(), "output_dir", "must not be empty");
  return c;
}

std::string config_to_text(const RunConfig& c) {
  json j;
  const auto& s = c.spin_system;
  j["spin_system"] = {{"spin", s.quad.spin.value()}, {"cq_hz", s.quad.cq_hz},
                      {"eta", s.quad.eta},           {"larmor_hz", s.larmor_hz},
                      {"shift_ppm", s.shift_ppm},    {"rotor_hz", s.rotor_hz},
                      {"second_order", s.second_order}};
  j["pulse"] = {{"n_steps", c.n_steps}, {"dt_s", c.dt_s}};
  j["powder"] = {{"n_alpha_beta", c.powder.n_alpha_beta},
                 {"n_gamma", c.powder.n_gamma},
                 {"rf_scales", c.powder.rf_scales},
                 {"repulsion_iterations", c.powder.repulsion_iterations},
                 {"seed", c.powder_seed}};
  j["modes"] = {{"grape", c.grape}, {"group_basis_sizes", c.group_basis_sizes}};
  const auto& o = c.optimizer;
  j["optimizer"] = {{"max_iterations", o.max_iterations},
                    {"gradient_tolerance", o.gradient_tolerance},
                    {"cost_tolerance", o.cost_tolerance},
                    {"memory", o.memory},
                    {"penalty_weight", o.penalty_weight},
                    {"line_search",
                     {{"sufficient_decrease", o.line_search.sufficient_decrease},
                      {"curvature", o.line_search.curvature},
                      {"max_evaluations", o.line_search.max_evaluations}}}};
  j["init_scale_hz"] = c.init_scale_hz;
  j["n_starts"] = c.n_starts;
  j["base_seed"] = c.base_seed;
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

}  // namespace mqpulse
