#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "elycoord/metrics.hpp"
#include "elycoord/scenarios.hpp"
#include "elycoord/sim.hpp"

// File formats (documented in docs/trace-format.md): trace CSV with metadata
// comment lines, full-fidelity trace JSON, metrics JSON, sweep CSVs, and
// representative-day CSVs plus manifest. All floating-point text is written
// with 17 significant digits so files round-trip and reruns are
// byte-comparable. Wall-clock columns are opt-in: they are the one thing that
// cannot be reproduced bit-for-bit.

namespace elycoord::io {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_wind_csv(const scenarios::WindProfile& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "timestamp,power_w\n";
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    out << detail::fmt(static_cast<double>(i) * w.dt) << ',' << detail::fmt(w.samples[i])
        << '\n';
  }
}

inline void write_representative_days(const scenarios::RepresentativeDaySet& set,
                                      const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["k"] = set.k;
  manifest["seed"] = set.seed;
  manifest["wcss"] = set.wcss;
  manifest["weights"] = set.weights;
  manifest["assignments"] = set.assignments;
  manifest["medoid_day_indices"] = set.medoid_indices;
  std::vector<std::string> files;
  for (int c = 0; c < set.k; ++c) {
    std::string name = "day_" + std::to_string(c) + ".csv";
    write_wind_csv(set.days[c], dir + "/" + name);
    files.push_back(name);
  }
  manifest["files"] = files;
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw ConfigError("cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

// One row per step. Per-unit columns are suffixed _0.._{n-1}. The solve_time
// column is written only on request (it is wall-clock, not reproducible).
inline void write_trace_csv(const sim::Trace& t, const std::string& path,
                            bool include_solve_time = false) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  const auto& cfg = t.config;
  out << "# trace_schema=1\n";
  out << "# n_ele=" << cfg.n_ele << '\n';
  out << "# dt_s=" << detail::fmt(cfg.controller.dt) << '\n';
  out << "# alpha=" << detail::fmt(cfg.controller.alpha) << '\n';
  out << "# epsilon=" << detail::fmt(cfg.controller.epsilon) << '\n';
  out << "# hto_max=";
  for (int i = 0; i < cfg.n_ele; ++i) {
    out << (i ? ";" : "") << detail::fmt(cfg.electrolyzers[i].hto_max);
  }
  out << '\n';
  out << "# solve_time_included=" << (include_solve_time ? 1 : 0) << '\n';

  out << "step,p_wind_w,p_total_w,storage_power_w,mismatch_w,feasible,relaxed,"
         "deviation_norm_a";
  if (include_solve_time) out << ",solve_time_s";
  for (int i = 0; i < cfg.n_ele; ++i) out << ",u_a_" << i;
  for (int i = 0; i < cfg.n_ele; ++i) out << ",p_w_" << i;
  for (int i = 0; i < cfg.n_ele; ++i) out << ",temp_c_" << i;
  for (int i = 0; i < cfg.n_ele; ++i) out << ",hto_" << i;
  out << '\n';

  for (const auto& s : t.steps) {
    out << s.step_index << ',' << detail::fmt(s.p_wind) << ',' << detail::fmt(s.p_total)
        << ',' << detail::fmt(s.storage_power) << ',' << detail::fmt(s.mismatch) << ','
        << (s.feasible ? 1 : 0) << ',' << (s.relaxed ? 1 : 0) << ','
        << detail::fmt(s.deviation_norm);
    if (include_solve_time) out << ',' << detail::fmt(s.solve_time);
    for (double v : s.u_applied) out << ',' << detail::fmt(v);
    for (double v : s.p_units) out << ',' << detail::fmt(v);
    for (double v : s.temps) out << ',' << detail::fmt(v);
    for (double v : s.hto) out << ',' << detail::fmt(v);
    out << '\n';
  }
}

inline nlohmann::json config_to_json(const config::SimConfig& c) {
  nlohmann::json j;
  j["n_ele"] = c.n_ele;
  j["ambient_temp"] = c.ambient_temp;
  j["horizon_steps"] = c.horizon_steps;
  j["rng_seed"] = c.rng_seed;
  j["controller"] = {{"epsilon", c.controller.epsilon},
                     {"alpha", c.controller.alpha},
                     {"dt", c.controller.dt}};
  j["wind_source"] = {{"path", c.wind_source.path},
                      {"scaling", c.wind_source.scaling},
                      {"target_peak_w", c.wind_source.target_peak_w}};
  j["initial_temps"] = nlohmann::json::array();
  j["initial_states"] = nlohmann::json::array();
  j["electrolyzers"] = nlohmann::json::array();
  for (int i = 0; i < c.n_ele; ++i) {
    const auto& p = c.electrolyzers[i];
    j["initial_temps"].push_back(c.initial_states[i].t_ele);
    j["initial_states"].push_back({{"n_an", c.initial_states[i].n_an},
                                   {"n_sep_l", c.initial_states[i].n_sep_l},
                                   {"n_sep_g", c.initial_states[i].n_sep_g}});
    j["electrolyzers"].push_back(
        {{"n_cell", p.n_cell},
         {"u_limit", p.u_limit},
         {"rho1", p.rho1},
         {"rho2", p.rho2},
         {"u_rev", p.u_rev},
         {"r_th", p.r_th},
         {"c_th", p.c_th},
         {"eta_f", p.eta_f},
         {"z_h", p.z_h},
         {"faraday", p.faraday},
         {"gas_const", p.gas_const},
         {"pressure", p.pressure},
         {"v_an", p.v_an},
         {"v_sep_g", p.v_sep_g},
         {"tau_sep_l", p.tau_sep_l},
         {"v_lye", p.v_lye},
         {"cross_c0", p.cross_c0},
         {"cross_c1", p.cross_c1},
         {"delta_i_max", p.delta_i_max},
         {"hto_max", p.hto_max},
         {"absolute_temperature_in_hto", p.absolute_temperature_in_hto}});
  }
  j["initial_currents"] = c.initial_currents;
  return j;
}

inline void write_trace_json(const sim::Trace& t, const std::string& path,
                             bool include_solve_time = false) {
  nlohmann::json j;
  j["config"] = config_to_json(t.config);
  j["total_clamp_events"] = t.total_clamp_events;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    nlohmann::json js = {{"step", s.step_index},
                         {"p_wind", s.p_wind},
                         {"u_desired", s.u_desired},
                         {"u_applied", s.u_applied},
                         {"p_units", s.p_units},
                         {"p_total", s.p_total},
                         {"storage_power", s.storage_power},
                         {"mismatch", s.mismatch},
                         {"hto", s.hto},
                         {"temps", s.temps},
                         {"feasible", s.feasible},
                         {"relaxed", s.relaxed},
                         {"deviation_norm", s.deviation_norm},
                         {"clamp_events", s.clamp_events}};
    if (include_solve_time) js["solve_time"] = s.solve_time;
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  nlohmann::json terminal = nlohmann::json::array();
  for (const auto& s : t.terminal_states) {
    terminal.push_back({{"t_ele", s.t_ele},
                        {"n_an", s.n_an},
                        {"n_sep_l", s.n_sep_l},
                        {"n_sep_g", s.n_sep_g}});
  }
  j["terminal_states"] = std::move(terminal);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump() << '\n';
}

inline void write_metrics_json(const metrics::RunMetrics& m,
                               const metrics::ContractionDiagnostics& diag,
                               const std::string& path, bool include_timing = false) {
  nlohmann::json j;
  j["energy_utilization"] = m.energy_utilization;
  j["storage_energy_wh"] = m.storage_energy_wh;
  j["hto_peak"] = m.hto_peak;
  j["hto_violations"] = m.hto_violations;
  j["relaxed_steps"] = m.relaxed_steps;
  j["clamp_events"] = m.clamp_events;
  if (include_timing) {
    j["solve_time"] = {{"avg_s", m.solve_time.avg},
                       {"p95_s", m.solve_time.p95},
                       {"max_s", m.solve_time.max}};
  }
  j["contraction"] = {{"q_hat", diag.q_hat},
                      {"omega_bar_w", diag.omega_bar},
                      {"e_f_bar_a", diag.e_f_bar},
                      {"l_h_w_per_a", diag.l_h},
                      {"uub_bound_w", diag.uub_bound},
                      {"usable_steps", diag.usable_steps},
                      {"applicable", diag.applicable}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline void write_sweep_gain_csv(const std::vector<metrics::SweepRow>& rows,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "factor,energy_utilization\n";
  for (const auto& r : rows) {
    out << detail::fmt(r.value) << ',' << detail::fmt(r.metrics.energy_utilization)
        << '\n';
  }
}

inline void write_sweep_alpha_csv(const std::vector<metrics::SweepRow>& rows,
                                  const std::string& path, bool include_timing = false) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "alpha,storage_energy_wh" << (include_timing ? ",solve_time_avg_s" : "")
      << '\n';
  for (const auto& r : rows) {
    out << detail::fmt(r.value) << ',' << detail::fmt(r.metrics.storage_energy_wh);
    if (include_timing) out << ',' << detail::fmt(r.metrics.solve_time.avg);
    out << '\n';
  }
}

// Lightweight column view of a trace CSV, enough for the report command and
// for external tooling round-trips.
struct TraceTable {
  int n_ele = 0;
  double dt = 1.0;
  std::vector<double> hto_max;  // per unit
  bool has_solve_time = false;
  std::vector<double> p_wind, p_total, storage_power, mismatch, deviation_norm,
      solve_time;
  std::vector<char> relaxed;
  std::vector<std::vector<double>> hto;  // [unit][step]
};

inline TraceTable read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace file not found: " + path);
  TraceTable t;
  std::string line;
  std::vector<std::string> header;
  std::map<std::string, std::size_t> col;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2);
      std::string val = line.substr(eq + 1);
      try {
        if (key == "n_ele") t.n_ele = std::stoi(val);
        if (key == "dt_s") t.dt = std::stod(val);
        if (key == "solve_time_included") t.has_solve_time = std::stoi(val) != 0;
        if (key == "hto_max") {
          std::stringstream ss(val);
          std::string part;
          while (std::getline(ss, part, ';')) t.hto_max.push_back(std::stod(part));
        }
      } catch (const std::exception&) {
        throw ConfigError(path + ": malformed metadata line '" + line + "'");
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
      if (t.n_ele <= 0 || !col.count("p_wind_w")) {
        throw ConfigError(path + ": missing metadata or trace header");
      }
      t.hto.resize(t.n_ele);
      continue;
    }
    if (cells.size() != header.size()) {
      throw ConfigError(path + ": row with wrong number of columns");
    }
    try {
      t.p_wind.push_back(std::stod(cells[col.at("p_wind_w")]));
      t.p_total.push_back(std::stod(cells[col.at("p_total_w")]));
      t.storage_power.push_back(std::stod(cells[col.at("storage_power_w")]));
      t.mismatch.push_back(std::stod(cells[col.at("mismatch_w")]));
      t.deviation_norm.push_back(std::stod(cells[col.at("deviation_norm_a")]));
      t.relaxed.push_back(cells[col.at("relaxed")] == "1");
      if (t.has_solve_time) {
        t.solve_time.push_back(std::stod(cells[col.at("solve_time_s")]));
      }
      for (int i = 0; i < t.n_ele; ++i) {
        t.hto[i].push_back(std::stod(cells[col.at("hto_" + std::to_string(i))]));
      }
    } catch (const std::exception&) {
      throw ConfigError(path + ": malformed trace row");
    }
  }
  if (t.p_wind.empty()) throw ConfigError(path + ": no data rows");
  if (static_cast<int>(t.hto_max.size()) != t.n_ele) {
    throw ConfigError(path + ": hto_max metadata does not match n_ele");
  }
  return t;
}

}  // namespace elycoord::io
