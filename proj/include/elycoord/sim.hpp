#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "elycoord/cbf.hpp"
#include "elycoord/config.hpp"
#include "elycoord/feedback_optimization.hpp"
#include "elycoord/plant.hpp"
#include "elycoord/safety.hpp"
#include "elycoord/scenarios.hpp"
#include "elycoord/types.hpp"

// Closed-loop engine. Each control step: gradient reference update ->
// per-unit admissible sets (operational box intersected with the barrier
// cubic's nonnegative region) -> feasibility check -> projection (relaxed,
// i.e. without the wind-power coupling, when the check fails) -> plant step.
// Deterministic given config and wind; solve_time is the only field carrying
// wall-clock measurements.

namespace elycoord::sim {

struct StepLog {
  long step_index = 0;
  double p_wind = 0.0;
  std::vector<double> u_desired;  // unconstrained gradient reference
  std::vector<double> u_applied;  // after the safety projection
  std::vector<double> p_units;    // at the interval-start temperatures [W]
  double p_total = 0.0;
  double storage_power = 0.0;  // max(0, p_total - p_wind)
  double mismatch = 0.0;       // e(t) used by this step's gradient update
  std::vector<double> hto;     // end-of-step impurity per unit
  std::vector<double> temps;   // end-of-step temperature per unit [degC]
  bool feasible = false;       // the coupled projection was provably feasible
  bool relaxed = false;        // coupling dropped this step
  double deviation_norm = 0.0; // ||u_applied - u_desired||
  double solve_time = 0.0;     // controller pipeline wall time [s]
  int clamp_events = 0;        // plant mole clamps this step
};

struct Trace {
  config::SimConfig config;
  std::vector<StepLog> steps;
  std::vector<ElectrolyzerState> terminal_states;
  long total_clamp_events = 0;
};

inline double storage_power(double p_total, double p_wind) {
  return std::max(0.0, p_total - p_wind);
}

inline Trace run(const config::SimConfig& cfg, const scenarios::WindProfile& wind) {
  {
    auto violations = config::validate(cfg);
    if (!violations.empty()) {
      throw ConfigError("run: invalid config: " + violations.front() +
                        (violations.size() > 1 ? " (and more)" : ""));
    }
  }
  const double dt = cfg.controller.dt;
  if (std::abs(wind.dt - dt) > 1e-9 * dt) {
    throw ConfigError("run: wind sampling period " + std::to_string(wind.dt) +
                      " s does not match controller dt; resample first");
  }
  if (static_cast<long>(wind.samples.size()) < cfg.horizon_steps) {
    throw ConfigError("run: wind profile shorter than the simulation horizon");
  }
  for (int i = 0; i < cfg.n_ele; ++i) {
    if (cbf::safe_value(cfg.electrolyzers[i], cfg.initial_states[i]) < 0.0) {
      throw ModelError("run: initial state of unit " + std::to_string(i) +
                       " is outside the safe set");
    }
  }

  const double t_a = cfg.ambient_temp;
  const double tol_power = 1e-6 * plant::cluster_rated_power(cfg.electrolyzers);

  Trace trace;
  trace.config = cfg;
  trace.steps.reserve(cfg.horizon_steps);

  std::vector<ElectrolyzerState> states = cfg.initial_states;
  std::vector<double> u_prev = cfg.initial_currents;
  std::vector<cbf::AdmissibleSet> sets(cfg.n_ele);

  using clock = std::chrono::steady_clock;
  for (long t = 0; t < cfg.horizon_steps; ++t) {
    const double w = wind.samples[t];
    StepLog log;
    log.step_index = t;
    log.p_wind = w;

    auto t0 = clock::now();

    log.mismatch = fo::power_mismatch(u_prev, cfg.electrolyzers, t_a, w);
    log.u_desired = fo::fo_update(u_prev, cfg.electrolyzers, t_a, w, cfg.controller);

    for (int i = 0; i < cfg.n_ele; ++i) {
      safety::BoxBounds box =
          safety::box_bounds(cfg.electrolyzers[i], states[i], u_prev[i], dt);
      cbf::CbfCoefficients k = cbf::cbf_coefficients(cfg.electrolyzers[i], states[i],
                                                     t_a, cfg.controller.alpha, dt);
      sets[i] = cbf::nonneg_region(k, {box.lower, box.upper});
    }

    safety::FeasibilityReport rep =
        safety::feasibility_check(sets, cfg.electrolyzers, states, w);
    if (!rep.all_nonempty) {
      long bad = 0;
      while (rep.per_unit_nonempty[bad]) ++bad;
      throw InfeasibleError("run: step " + std::to_string(t) + ": unit " +
                            std::to_string(bad) +
                            " has an empty admissible set; no relaxation exists");
    }
    safety::ProjectionResult proj = safety::project(
        log.u_desired, sets, cfg.electrolyzers, states, w, rep.relaxed, tol_power);

    log.solve_time = std::chrono::duration<double>(clock::now() - t0).count();

    log.u_applied = proj.u;
    log.feasible = rep.proposition1_holds;
    log.relaxed = rep.relaxed;
    double dev2 = 0.0;
    for (int i = 0; i < cfg.n_ele; ++i) {
      double d = log.u_applied[i] - log.u_desired[i];
      dev2 += d * d;
    }
    log.deviation_norm = std::sqrt(dev2);

    log.p_units.resize(cfg.n_ele);
    log.hto.resize(cfg.n_ele);
    log.temps.resize(cfg.n_ele);
    for (int i = 0; i < cfg.n_ele; ++i) {
      log.p_units[i] = plant::electrolyzer_power(cfg.electrolyzers[i],
                                                 states[i].t_ele, log.u_applied[i]);
      log.p_total += log.p_units[i];
      plant::StepResult sr =
          plant::step(cfg.electrolyzers[i], states[i], log.u_applied[i], t_a, dt);
      states[i] = sr.state;
      log.clamp_events += sr.clamped;
      log.hto[i] = plant::hto(cfg.electrolyzers[i], states[i]);
      log.temps[i] = states[i].t_ele;
    }
    log.storage_power = storage_power(log.p_total, w);
    trace.total_clamp_events += log.clamp_events;

    u_prev = log.u_applied;
    trace.steps.push_back(std::move(log));
  }
  trace.terminal_states = std::move(states);
  return trace;
}

}  // namespace elycoord::sim
