#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "elycoord/plant.hpp"
#include "elycoord/types.hpp"

// Run configuration: JSON schema (documented in docs/config-schema.md),
// strict loading with defaults, invariant validation, and the crossover-slope
// calibration routine. Loading is strict about unknown keys so typos surface
// as errors instead of silently falling back to defaults.

namespace elycoord::config {

struct WindSource {
  std::string path;                      // CSV file; may be overridden on the CLI
  std::string scaling = "cluster_rating";  // "cluster_rating" | "peak" | "none"
  double target_peak_w = 0.0;            // used when scaling == "peak"
};

struct SimConfig {
  int n_ele = 0;
  double ambient_temp = 25.0;  // [degC]
  long horizon_steps = 86400;
  std::uint64_t rng_seed = 12345;
  ControllerParams controller;
  WindSource wind_source;
  std::vector<ElectrolyzerParams> electrolyzers;
  std::vector<ElectrolyzerState> initial_states;  // t_ele filled from initial_temps
  std::vector<double> initial_currents;           // applied current before step 0 [A]
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& ctx) {
  for (const auto& item : j.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
  }
}

inline double get_number(const json& j, const char* key, double fallback,
                         const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ConfigError(ctx + "." + key + ": expected a number");
  }
  return j.at(key).get<double>();
}

inline bool get_bool(const json& j, const char* key, bool fallback,
                     const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) {
    throw ConfigError(ctx + "." + key + ": expected a boolean");
  }
  return j.at(key).get<bool>();
}

// Applies one level of electrolyzer parameter overrides. u_rev defaults to
// 1.229 V per cell unless it was given explicitly at any level, so overriding
// n_cell alone keeps the reversible voltage consistent.
inline void apply_params(ElectrolyzerParams& p, bool& u_rev_explicit, const json& j,
                         const std::string& ctx) {
  check_keys(j,
             {"n_cell", "u_limit", "rho1", "rho2", "u_rev", "r_th", "c_th", "eta_f",
              "z_h", "faraday", "gas_const", "pressure", "v_an", "v_sep_g",
              "tau_sep_l", "v_lye", "cross_c0", "cross_c1", "delta_i_max", "hto_max",
              "absolute_temperature_in_hto"},
             ctx);
  if (j.contains("n_cell")) {
    if (!j.at("n_cell").is_number_integer()) {
      throw ConfigError(ctx + ".n_cell: expected an integer");
    }
    p.n_cell = j.at("n_cell").get<int>();
  }
  p.u_limit = get_number(j, "u_limit", p.u_limit, ctx);
  p.rho1 = get_number(j, "rho1", p.rho1, ctx);
  p.rho2 = get_number(j, "rho2", p.rho2, ctx);
  p.r_th = get_number(j, "r_th", p.r_th, ctx);
  p.c_th = get_number(j, "c_th", p.c_th, ctx);
  p.eta_f = get_number(j, "eta_f", p.eta_f, ctx);
  p.z_h = get_number(j, "z_h", p.z_h, ctx);
  p.faraday = get_number(j, "faraday", p.faraday, ctx);
  p.gas_const = get_number(j, "gas_const", p.gas_const, ctx);
  p.pressure = get_number(j, "pressure", p.pressure, ctx);
  p.v_an = get_number(j, "v_an", p.v_an, ctx);
  p.v_sep_g = get_number(j, "v_sep_g", p.v_sep_g, ctx);
  p.tau_sep_l = get_number(j, "tau_sep_l", p.tau_sep_l, ctx);
  p.v_lye = get_number(j, "v_lye", p.v_lye, ctx);
  p.cross_c0 = get_number(j, "cross_c0", p.cross_c0, ctx);
  p.cross_c1 = get_number(j, "cross_c1", p.cross_c1, ctx);
  p.delta_i_max = get_number(j, "delta_i_max", p.delta_i_max, ctx);
  p.hto_max = get_number(j, "hto_max", p.hto_max, ctx);
  p.absolute_temperature_in_hto =
      get_bool(j, "absolute_temperature_in_hto", p.absolute_temperature_in_hto, ctx);
  if (j.contains("u_rev")) {
    p.u_rev = get_number(j, "u_rev", p.u_rev, ctx);
    u_rev_explicit = true;
  }
}

}  // namespace detail

// Every declared invariant, reported as data; an empty result means valid.
inline std::vector<std::string> validate(const SimConfig& c) {
  std::vector<std::string> v;
  auto fail = [&](const std::string& field, const std::string& why) {
    v.push_back(field + ": " + why);
  };

  if (c.n_ele < 1) fail("n_ele", "must be at least 1");
  if (c.horizon_steps < 1) fail("horizon_steps", "must be at least 1");
  if (static_cast<int>(c.electrolyzers.size()) != c.n_ele) {
    fail("electrolyzers", "length must equal n_ele");
  }
  if (static_cast<int>(c.initial_states.size()) != c.n_ele) {
    fail("initial_temps", "length must equal n_ele");
  }
  if (static_cast<int>(c.initial_currents.size()) != c.n_ele) {
    fail("initial_currents", "length must equal n_ele");
  }

  if (!(c.controller.epsilon > 0.0)) fail("controller.epsilon", "must be positive");
  if (!(c.controller.alpha > 0.0 && c.controller.alpha <= 1.0)) {
    fail("controller.alpha", "alpha out of (0,1]");
  }
  if (!(c.controller.dt > 0.0)) fail("controller.dt", "must be positive");

  if (c.wind_source.scaling != "cluster_rating" && c.wind_source.scaling != "peak" &&
      c.wind_source.scaling != "none") {
    fail("wind_source.scaling", "must be one of cluster_rating|peak|none");
  }
  if (c.wind_source.scaling == "peak" && !(c.wind_source.target_peak_w > 0.0)) {
    fail("wind_source.target_peak_w", "must be positive when scaling is 'peak'");
  }

  for (std::size_t i = 0; i < c.electrolyzers.size(); ++i) {
    const auto& p = c.electrolyzers[i];
    std::string at = "electrolyzers[" + std::to_string(i) + "].";
    if (p.n_cell < 1) fail(at + "n_cell", "must be at least 1");
    if (!(p.u_limit > 0.0)) fail(at + "u_limit", "must be positive");
    if (!(p.rho2 <= 0.0)) fail(at + "rho2", "rho2 must be <= 0");
    if (!(p.rho1 + p.rho2 * c.ambient_temp > 0.0)) {
      fail(at + "rho1", "rho1 + rho2*ambient_temp must be positive");
    }
    if (!(p.u_rev >= 0.0)) fail(at + "u_rev", "must be nonnegative");
    const std::pair<const char*, double> positives[] = {
        {"r_th", p.r_th},         {"c_th", p.c_th},
        {"pressure", p.pressure}, {"v_an", p.v_an},
        {"v_sep_g", p.v_sep_g},   {"tau_sep_l", p.tau_sep_l},
        {"v_lye", p.v_lye},       {"z_h", p.z_h},
        {"faraday", p.faraday},   {"gas_const", p.gas_const}};
    for (const auto& [name, val] : positives) {
      if (!(val > 0.0)) fail(at + name, std::string(name) + " must be positive");
    }
    if (!(p.eta_f > 0.0 && p.eta_f <= 1.0)) fail(at + "eta_f", "must be in (0,1]");
    if (!(p.hto_max > 0.0 && p.hto_max < 1.0)) fail(at + "hto_max", "must be in (0,1)");
    if (!(p.delta_i_max > 0.0)) fail(at + "delta_i_max", "must be positive");
    if (!(p.cross_c0 >= 0.0)) fail(at + "cross_c0", "must be nonnegative");
    if (!(p.cross_c1 >= 0.0)) fail(at + "cross_c1", "must be nonnegative");
  }

  for (std::size_t i = 0; i < c.initial_states.size(); ++i) {
    const auto& s = c.initial_states[i];
    std::string at = "initial_states[" + std::to_string(i) + "].";
    if (!(s.n_an >= 0.0)) fail(at + "n_an", "must be nonnegative");
    if (!(s.n_sep_l >= 0.0)) fail(at + "n_sep_l", "must be nonnegative");
    if (!(s.n_sep_g >= 0.0)) fail(at + "n_sep_g", "must be nonnegative");
    if (i < c.electrolyzers.size()) {
      double h = plant::hto(c.electrolyzers[i], s);
      if (!(h >= 0.0 && h < 1.0)) fail(at + "n_sep_g", "implies hto outside [0,1)");
    }
  }
  for (std::size_t i = 0; i < c.initial_currents.size(); ++i) {
    if (!(c.initial_currents[i] >= 0.0)) {
      fail("initial_currents[" + std::to_string(i) + "]", "must be nonnegative");
    }
  }
  return v;
}

// Builds a SimConfig from parsed JSON, filling defaults for omitted fields and
// rejecting unknown keys, then validates. See docs/config-schema.md.
inline SimConfig load_config_json(const detail::json& j) {
  using detail::json;
  detail::check_keys(j,
                     {"n_ele", "ambient_temp", "initial_temps", "horizon_steps",
                      "rng_seed", "controller", "wind_source", "electrolyzer_defaults",
                      "electrolyzers", "initial_states", "initial_currents"},
                     "config");
  SimConfig c;
  if (!j.contains("n_ele")) throw ConfigError("config.n_ele: required");
  if (!j.at("n_ele").is_number_integer()) throw ConfigError("config.n_ele: expected an integer");
  c.n_ele = j.at("n_ele").get<int>();
  if (c.n_ele < 1) throw ConfigError("config.n_ele: must be at least 1");

  c.ambient_temp = detail::get_number(j, "ambient_temp", c.ambient_temp, "config");
  c.horizon_steps = static_cast<long>(
      detail::get_number(j, "horizon_steps", static_cast<double>(c.horizon_steps), "config"));
  if (j.contains("rng_seed")) {
    if (!j.at("rng_seed").is_number_integer()) {
      throw ConfigError("config.rng_seed: expected an integer");
    }
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  }

  if (j.contains("controller")) {
    const json& jc = j.at("controller");
    detail::check_keys(jc, {"epsilon", "alpha", "dt"}, "controller");
    c.controller.epsilon = detail::get_number(jc, "epsilon", c.controller.epsilon, "controller");
    c.controller.alpha = detail::get_number(jc, "alpha", c.controller.alpha, "controller");
    c.controller.dt = detail::get_number(jc, "dt", c.controller.dt, "controller");
  }

  if (j.contains("wind_source")) {
    const json& jw = j.at("wind_source");
    detail::check_keys(jw, {"path", "scaling", "target_peak_w"}, "wind_source");
    if (jw.contains("path")) {
      if (!jw.at("path").is_string()) throw ConfigError("wind_source.path: expected a string");
      c.wind_source.path = jw.at("path").get<std::string>();
    }
    if (jw.contains("scaling")) {
      if (!jw.at("scaling").is_string()) throw ConfigError("wind_source.scaling: expected a string");
      c.wind_source.scaling = jw.at("scaling").get<std::string>();
    }
    c.wind_source.target_peak_w =
        detail::get_number(jw, "target_peak_w", c.wind_source.target_peak_w, "wind_source");
  }

  ElectrolyzerParams base;
  bool base_u_rev_explicit = false;
  if (j.contains("electrolyzer_defaults")) {
    detail::apply_params(base, base_u_rev_explicit, j.at("electrolyzer_defaults"),
                         "electrolyzer_defaults");
  }

  c.electrolyzers.assign(c.n_ele, base);
  std::vector<bool> u_rev_explicit(c.n_ele, base_u_rev_explicit);
  if (j.contains("electrolyzers")) {
    const json& ja = j.at("electrolyzers");
    if (!ja.is_array() || static_cast<int>(ja.size()) != c.n_ele) {
      throw ConfigError("config.electrolyzers: expected an array of length n_ele");
    }
    for (int i = 0; i < c.n_ele; ++i) {
      bool explicit_i = u_rev_explicit[i];
      detail::apply_params(c.electrolyzers[i], explicit_i, ja.at(i),
                           "electrolyzers[" + std::to_string(i) + "]");
      u_rev_explicit[i] = explicit_i;
    }
  }
  for (int i = 0; i < c.n_ele; ++i) {
    if (!u_rev_explicit[i]) c.electrolyzers[i].u_rev = 1.229 * c.electrolyzers[i].n_cell;
  }

  if (!j.contains("initial_temps")) throw ConfigError("config.initial_temps: required");
  const json& jt = j.at("initial_temps");
  if (!jt.is_array() || static_cast<int>(jt.size()) != c.n_ele) {
    throw ConfigError("config.initial_temps: expected an array of length n_ele");
  }
  c.initial_states.resize(c.n_ele);
  for (int i = 0; i < c.n_ele; ++i) {
    if (!jt.at(i).is_number()) throw ConfigError("config.initial_temps: expected numbers");
    c.initial_states[i].t_ele = jt.at(i).get<double>();
  }

  if (j.contains("initial_states")) {
    const json& js = j.at("initial_states");
    if (!js.is_array() || static_cast<int>(js.size()) != c.n_ele) {
      throw ConfigError("config.initial_states: expected an array of length n_ele");
    }
    for (int i = 0; i < c.n_ele; ++i) {
      std::string ctx = "initial_states[" + std::to_string(i) + "]";
      detail::check_keys(js.at(i), {"n_an", "n_sep_l", "n_sep_g"}, ctx);
      c.initial_states[i].n_an = detail::get_number(js.at(i), "n_an", 0.0, ctx);
      c.initial_states[i].n_sep_l = detail::get_number(js.at(i), "n_sep_l", 0.0, ctx);
      c.initial_states[i].n_sep_g = detail::get_number(js.at(i), "n_sep_g", 0.0, ctx);
    }
  }

  c.initial_currents.assign(c.n_ele, 0.0);
  if (j.contains("initial_currents")) {
    const json& ji = j.at("initial_currents");
    if (!ji.is_array() || static_cast<int>(ji.size()) != c.n_ele) {
      throw ConfigError("config.initial_currents: expected an array of length n_ele");
    }
    for (int i = 0; i < c.n_ele; ++i) {
      if (!ji.at(i).is_number()) throw ConfigError("config.initial_currents: expected numbers");
      c.initial_currents[i] = ji.at(i).get<double>();
    }
  }

  std::vector<std::string> violations = validate(c);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid config:";
    for (const auto& s : violations) msg << "\n  " << s;
    throw ConfigError(msg.str());
  }
  return c;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  detail::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return load_config_json(j);
}

// Calibrates the crossover slope so that sustained operation at a low-load
// setpoint settles just inside the impurity ceiling: bisection on cross_c1
// against the steady impurity balance at load_fraction of the rated current
// (rated = max_current at t_rated). Returns the calibrated slope; the result
// always satisfies steady_hto <= target (approach from below).
inline double calibrate_cross_c1(const ElectrolyzerParams& params, double load_fraction = 0.1,
                                 double target_hto = -1.0, double t_rated = 60.0) {
  if (target_hto <= 0.0) target_hto = params.hto_max * (1.0 - 1e-6);
  double i_cal = load_fraction * plant::max_current(params, t_rated);
  if (i_cal <= 0.0) throw ModelError("calibrate_cross_c1: nonpositive calibration current");

  ElectrolyzerParams p = params;
  auto hto_at = [&](double c1) {
    p.cross_c1 = std::max(0.0, c1);
    return plant::steady_hto(p, i_cal);
  };
  if (hto_at(0.0) >= target_hto) {
    throw ModelError("calibrate_cross_c1: cross_c0 alone exceeds the target impurity");
  }
  double lo = 0.0;
  double hi = 1e-9;
  int guard = 0;
  while (hto_at(hi) < target_hto && ++guard < 200) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hto_at(mid) < target_hto) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;  // strictly below the target
}

}  // namespace elycoord::config
