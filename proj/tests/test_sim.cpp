#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "elycoord/sim.hpp"

using namespace elycoord;

namespace {

config::SimConfig make_config(int n, long horizon, double dt = 1.0) {
  config::SimConfig cfg;
  cfg.n_ele = n;
  cfg.horizon_steps = horizon;
  cfg.controller.dt = dt;
  cfg.electrolyzers.assign(n, ElectrolyzerParams{});
  cfg.initial_states.assign(n, ElectrolyzerState{});
  cfg.initial_currents.assign(n, 0.0);
  return cfg;
}

scenarios::WindProfile constant_wind(double w, long steps, double dt = 1.0) {
  scenarios::WindProfile p;
  p.dt = dt;
  p.samples.assign(steps, w);
  return p;
}

// Fluctuating profile in [base, base + span] W, deterministic.
scenarios::WindProfile wavy_wind(double base, double span, long steps, double dt = 1.0) {
  scenarios::WindProfile p;
  p.dt = dt;
  p.samples.resize(steps);
  for (long t = 0; t < steps; ++t) {
    double s = 0.5 + 0.35 * std::sin(0.013 * t) + 0.15 * std::sin(0.11 * t + 1.0);
    p.samples[t] = base + span * s;
  }
  return p;
}

// Exact flux-balance state for a sustained current: every compartment passes
// the crossover flow through and the temperature sits at the thermal fixed
// point, so a plant step leaves the state unchanged up to roundoff.
ElectrolyzerState steady_state(const ElectrolyzerParams& p, double i, double t_a) {
  ElectrolyzerState s;
  s.t_ele = fo::steady_temperature(p, i, t_a);
  double cross = plant::crossover_rate(p, i);
  s.n_an = cross * 2.0 * p.v_an / p.v_lye;
  s.n_sep_l = cross * p.tau_sep_l;
  s.n_sep_g = cross * 2.0 * p.z_h * p.faraday * p.pressure * p.v_sep_g /
              (p.eta_f * p.n_cell * plant::hto_temperature(p, s.t_ele) *
               p.gas_const * i);
  return s;
}

}  // namespace

TEST_CASE("closed loop holds a steady operating point", "[sim]") {
  const double u_star = 10.0;
  auto cfg = make_config(2, 100);
  for (int i = 0; i < 2; ++i) {
    cfg.initial_states[i] = steady_state(cfg.electrolyzers[i], u_star, cfg.ambient_temp);
    cfg.initial_currents[i] = u_star;
  }
  double w = 2.0 * fo::steady_power(cfg.electrolyzers[0], u_star, cfg.ambient_temp);
  auto trace = sim::run(cfg, constant_wind(w, 100));

  REQUIRE(trace.steps.size() == 100);
  double hto_star = plant::steady_hto(cfg.electrolyzers[0], u_star);
  for (const auto& log : trace.steps) {
    for (int i = 0; i < 2; ++i) {
      CHECK(log.u_applied[i] == Catch::Approx(u_star).margin(1e-9));
      CHECK(log.temps[i] ==
            Catch::Approx(cfg.initial_states[i].t_ele).margin(1e-9));
      CHECK(log.hto[i] == Catch::Approx(hto_star).margin(1e-11));
    }
    CHECK(std::abs(log.mismatch) <= 1e-8 * w);
    CHECK(!log.relaxed);
    CHECK(log.feasible);
  }
  CHECK(trace.total_clamp_events == 0);
}

TEST_CASE("zero wind from rest stays at rest", "[sim]") {
  auto cfg = make_config(3, 50);
  auto trace = sim::run(cfg, constant_wind(0.0, 50));
  for (const auto& log : trace.steps) {
    for (double u : log.u_applied) CHECK(u == 0.0);
    CHECK(log.p_total == 0.0);
    CHECK(log.storage_power == 0.0);
    CHECK(log.mismatch == 0.0);
  }
}

TEST_CASE("traces are bitwise deterministic", "[sim]") {
  auto cfg = make_config(3, 200);
  cfg.initial_states[0].t_ele = 30.0;
  cfg.initial_states[1].t_ele = 45.0;
  cfg.initial_states[2].t_ele = 60.0;
  auto wind = wavy_wind(500.0, 3000.0, 200);

  auto a = sim::run(cfg, wind);
  auto b = sim::run(cfg, wind);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    const auto& x = a.steps[t];
    const auto& y = b.steps[t];
    CHECK(x.p_wind == y.p_wind);
    CHECK(x.u_desired == y.u_desired);
    CHECK(x.u_applied == y.u_applied);
    CHECK(x.p_units == y.p_units);
    CHECK(x.p_total == y.p_total);
    CHECK(x.storage_power == y.storage_power);
    CHECK(x.mismatch == y.mismatch);
    CHECK(x.hto == y.hto);
    CHECK(x.temps == y.temps);
    CHECK(x.feasible == y.feasible);
    CHECK(x.relaxed == y.relaxed);
    CHECK(x.deviation_norm == y.deviation_norm);
    CHECK(x.clamp_events == y.clamp_events);
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(a.terminal_states[i].t_ele == b.terminal_states[i].t_ele);
    CHECK(a.terminal_states[i].n_sep_g == b.terminal_states[i].n_sep_g);
  }
}

TEST_CASE("every step satisfies the one-step impurity contraction", "[sim]") {
  auto cfg = make_config(2, 400);
  cfg.controller.alpha = 0.6;
  // Start one unit close to the impurity ceiling so the barrier has work to do.
  cfg.initial_states[0].t_ele = 55.0;
  const auto& p0 = cfg.electrolyzers[0];
  cfg.initial_states[0].n_sep_g = 0.0195 * p0.pressure * p0.v_sep_g /
                                  (p0.gas_const * plant::hto_temperature(p0, 55.0));
  cfg.initial_states[0].n_sep_l = 0.004;
  cfg.initial_states[0].n_an = 0.002;
  cfg.initial_states[1].t_ele = 35.0;
  auto wind = wavy_wind(200.0, 2500.0, 400);
  auto trace = sim::run(cfg, wind);

  const double alpha = cfg.controller.alpha;
  for (int i = 0; i < 2; ++i) {
    double prev = plant::hto(cfg.electrolyzers[i], cfg.initial_states[i]);
    double cap = cfg.electrolyzers[i].hto_max;
    for (const auto& log : trace.steps) {
      double next = log.hto[i];
      CHECK(next <= (1.0 - alpha) * prev + alpha * cap + 1e-12);
      CHECK(next <= cap + 1e-9);
      prev = next;
    }
  }
}

TEST_CASE("applied currents respect ramp and capability limits", "[sim]") {
  auto cfg = make_config(2, 300);
  cfg.initial_states[0].t_ele = 30.0;
  cfg.initial_states[1].t_ele = 50.0;
  cfg.initial_currents = {2.0, 6.0};
  auto wind = wavy_wind(0.0, 4200.0, 300);
  auto trace = sim::run(cfg, wind);

  std::vector<double> u_prev = cfg.initial_currents;
  std::vector<double> t_prev = {30.0, 50.0};
  const double dt = cfg.controller.dt;
  for (const auto& log : trace.steps) {
    for (int i = 0; i < 2; ++i) {
      const auto& p = cfg.electrolyzers[i];
      CHECK(log.u_applied[i] >= 0.0);
      CHECK(std::abs(log.u_applied[i] - u_prev[i]) <= p.delta_i_max * dt + 1e-12);
      CHECK(log.u_applied[i] <= plant::max_current(p, t_prev[i]) + 1e-9);
      // Logged unit power is taken at the interval-start temperature.
      CHECK(log.p_units[i] ==
            Catch::Approx(plant::electrolyzer_power(p, t_prev[i], log.u_applied[i]))
                .margin(1e-9));
      t_prev[i] = log.temps[i];
    }
    u_prev = log.u_applied;
  }
}

TEST_CASE("storage absorbs exactly the surplus and coupling caps the draw", "[sim]") {
  auto cfg = make_config(2, 250);
  cfg.initial_states[0].t_ele = 40.0;
  cfg.initial_states[1].t_ele = 40.0;
  auto wind = wavy_wind(100.0, 3000.0, 250);
  auto trace = sim::run(cfg, wind);

  double tol_power = 1e-6 * plant::cluster_rated_power(cfg.electrolyzers);
  for (const auto& log : trace.steps) {
    double sum = 0.0;
    for (double p : log.p_units) sum += p;
    CHECK(log.p_total == Catch::Approx(sum).margin(1e-9));
    CHECK(log.storage_power ==
          Catch::Approx(std::max(0.0, log.p_total - log.p_wind)).margin(1e-12));
    if (!log.relaxed) {
      CHECK(log.p_total <= log.p_wind + tol_power + 1e-9);
    }
  }
}

TEST_CASE("mismatch is the steady-map error at the previous currents", "[sim]") {
  auto cfg = make_config(2, 60);
  cfg.initial_currents = {3.0, 7.0};
  auto wind = wavy_wind(500.0, 2000.0, 60);
  auto trace = sim::run(cfg, wind);

  std::vector<double> u_prev = cfg.initial_currents;
  for (const auto& log : trace.steps) {
    double expect =
        fo::power_mismatch(u_prev, cfg.electrolyzers, cfg.ambient_temp, log.p_wind);
    CHECK(log.mismatch == Catch::Approx(expect).margin(1e-9));
    double dev2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      double d = log.u_applied[i] - log.u_desired[i];
      dev2 += d * d;
    }
    CHECK(log.deviation_norm == Catch::Approx(std::sqrt(dev2)).margin(1e-12));
    u_prev = log.u_applied;
  }
}

TEST_CASE("run rejects bad inputs loudly", "[sim]") {
  auto cfg = make_config(1, 100);

  // Wind shorter than the horizon.
  CHECK_THROWS_AS(sim::run(cfg, constant_wind(100.0, 50)), ConfigError);

  // Sampling-period mismatch.
  CHECK_THROWS_AS(sim::run(cfg, constant_wind(100.0, 100, 60.0)), ConfigError);

  // Invalid controller settings.
  auto bad = cfg;
  bad.controller.alpha = 0.0;
  CHECK_THROWS_AS(sim::run(bad, constant_wind(100.0, 100)), ConfigError);

  // Initial state outside the safe set.
  auto unsafe = cfg;
  unsafe.initial_states[0].n_sep_g = 0.12;
  CHECK_THROWS_AS(sim::run(unsafe, constant_wind(100.0, 100)), ModelError);
}

TEST_CASE("initial currents seed the first ramp window", "[sim]") {
  auto cfg = make_config(1, 5);
  cfg.initial_currents = {8.0};
  // Zero wind pulls the reference down, but the ramp cap limits the descent.
  auto trace = sim::run(cfg, constant_wind(0.0, 5));
  double expect = 8.0 - cfg.electrolyzers[0].delta_i_max * cfg.controller.dt;
  CHECK(trace.steps[0].u_applied[0] >= expect - 1e-12);
  CHECK(trace.steps[0].u_applied[0] <= 8.0);
}
