#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "elycoord/feedback_optimization.hpp"
#include "elycoord/sim.hpp"

// Scalar KPIs over traces and the two sensitivity sweeps. All metrics are
// pure functions of the trace; the sweeps rerun the simulation per parameter
// value (optionally across threads — results are indexed, so the outcome is
// independent of the thread count).

namespace elycoord::metrics {

struct SolveTimeStats {
  double avg = 0.0;
  double p95 = 0.0;  // nearest-rank percentile
  double max = 0.0;
};

struct RunMetrics {
  double energy_utilization = 1.0;  // wind-served energy fraction, [0,1]
  double storage_energy_wh = 0.0;
  double hto_peak = 0.0;
  long hto_violations = 0;  // steps*units with hto > hto_max + 1e-9
  SolveTimeStats solve_time;
  long relaxed_steps = 0;
  long clamp_events = 0;
};

// Fraction of wind energy actually absorbed by the cluster. Power drawn from
// storage (p_total above p_wind) does not count toward the numerator; a
// zero-wind trace scores 1 by convention.
inline double energy_utilization(const sim::Trace& t) {
  double served = 0.0;
  double offered = 0.0;
  for (const auto& s : t.steps) {
    served += std::min(s.p_total, s.p_wind);
    offered += s.p_wind;
  }
  if (offered <= 0.0) return 1.0;
  return served / offered;
}

// Energy drawn from storage to keep the cluster at its safety floor [Wh].
inline double storage_energy(const sim::Trace& t) {
  double sum = 0.0;
  for (const auto& s : t.steps) sum += s.storage_power;
  return sum * t.config.controller.dt / 3600.0;
}

inline SolveTimeStats solve_time_stats(const sim::Trace& t) {
  SolveTimeStats st;
  if (t.steps.empty()) return st;
  std::vector<double> v;
  v.reserve(t.steps.size());
  double sum = 0.0;
  for (const auto& s : t.steps) {
    v.push_back(s.solve_time);
    sum += s.solve_time;
  }
  std::sort(v.begin(), v.end());
  st.avg = sum / static_cast<double>(v.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
  st.p95 = v[std::max<std::size_t>(rank, 1) - 1];
  st.max = v.back();
  return st;
}

inline RunMetrics run_metrics(const sim::Trace& t) {
  RunMetrics m;
  m.energy_utilization = energy_utilization(t);
  m.storage_energy_wh = storage_energy(t);
  m.solve_time = solve_time_stats(t);
  m.clamp_events = t.total_clamp_events;
  for (const auto& s : t.steps) {
    if (s.relaxed) ++m.relaxed_steps;
    for (std::size_t i = 0; i < s.hto.size(); ++i) {
      m.hto_peak = std::max(m.hto_peak, s.hto[i]);
      if (s.hto[i] > t.config.electrolyzers[i].hto_max + 1e-9) ++m.hto_violations;
    }
  }
  return m;
}

struct ContractionDiagnostics {
  double q_hat = 0.0;     // empirical one-step contraction ratio
  double omega_bar = 0.0; // largest wind step [W]
  double e_f_bar = 0.0;   // largest safety-layer deviation [A]
  double l_h = 0.0;       // largest cluster gradient along the trace [W/A]
  double uub_bound = 0.0; // (omega_bar + l_h*e_f_bar)/(1 - q_hat)
  long usable_steps = 0;  // steps entering the q_hat estimate
  bool applicable = false;  // q_hat < 1 with at least one usable step
};

// Tracking error recomputed from applied inputs: e(t) = sum_i h_i(u_i(t)) - p_wind(t).
inline std::vector<double> mismatch_series(const sim::Trace& t) {
  std::vector<double> e;
  e.reserve(t.steps.size());
  for (const auto& s : t.steps) {
    e.push_back(fo::power_mismatch(s.u_applied, t.config.electrolyzers,
                                   t.config.ambient_temp, s.p_wind));
  }
  return e;
}

// Empirical contraction ratio and the ultimate-bound it implies. Steps where
// the projection was active, the wind moved more than its median step, or the
// error sits at the noise floor are excluded — they estimate a different
// regime than the unconstrained contraction argument.
inline ContractionDiagnostics contraction_diagnostics(const sim::Trace& t,
                                                      const config::SimConfig& cfg) {
  ContractionDiagnostics d;
  if (t.steps.size() < 2) return d;

  std::vector<double> e = mismatch_series(t);
  double max_wind = 0.0;
  std::vector<double> wind_steps;
  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
    double dw = std::abs(t.steps[i + 1].p_wind - t.steps[i].p_wind);
    wind_steps.push_back(dw);
    d.omega_bar = std::max(d.omega_bar, dw);
  }
  for (const auto& s : t.steps) max_wind = std::max(max_wind, s.p_wind);
  double med = 0.0;
  if (!wind_steps.empty()) {
    std::vector<double> sorted = wind_steps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    med = sorted[sorted.size() / 2];
  }
  double noise_floor = std::max(1e-9, 1e-6 * max_wind);

  for (const auto& s : t.steps) {
    d.e_f_bar = std::max(d.e_f_bar, s.deviation_norm);
    double grad_sum = 0.0;
    for (std::size_t i = 0; i < s.u_applied.size(); ++i) {
      grad_sum += fo::steady_power_gradient(cfg.electrolyzers[i], s.u_applied[i],
                                            cfg.ambient_temp);
    }
    d.l_h = std::max(d.l_h, grad_sum);
  }

  for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
    const auto& next = t.steps[i + 1];
    if (next.relaxed || next.deviation_norm > 1e-9) continue;
    if (wind_steps[i] > med) continue;
    if (std::abs(e[i]) <= noise_floor) continue;
    double ratio = (std::abs(e[i + 1]) - d.omega_bar) / std::abs(e[i]);
    d.q_hat = std::max(d.q_hat, std::max(0.0, ratio));
    ++d.usable_steps;
  }
  d.applicable = d.usable_steps > 0 && d.q_hat < 1.0;
  double denom = 1.0 - d.q_hat;
  d.uub_bound = denom > 0.0 ? (d.omega_bar + d.l_h * d.e_f_bar) / denom
                            : std::numeric_limits<double>::infinity();
  return d;
}

struct SweepRow {
  double value = 0.0;  // gain factor or alpha
  RunMetrics metrics;
};

namespace detail {

template <typename MakeConfig>
inline std::vector<SweepRow> sweep(const std::vector<double>& values,
                                   const scenarios::WindProfile& wind,
                                   MakeConfig make_config, unsigned max_threads) {
  std::vector<SweepRow> rows(values.size());
  auto work = [&](std::size_t i) {
    config::SimConfig c = make_config(values[i]);
    sim::Trace t = sim::run(c, wind);
    rows[i] = {values[i], run_metrics(t)};
  };
  unsigned n_threads = std::max(1u, std::min<unsigned>(max_threads, values.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    for (unsigned w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < values.size();
             i = cursor.fetch_add(1)) {
          work(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace detail

// One full run per gain factor; epsilon is scaled relative to the configured
// nominal gain.
inline std::vector<SweepRow> sweep_gain(const config::SimConfig& cfg,
                                        const scenarios::WindProfile& wind,
                                        const std::vector<double>& factors,
                                        unsigned max_threads = 1) {
  if (factors.empty()) throw ConfigError("sweep_gain: empty factor list");
  return detail::sweep(
      factors, wind,
      [&](double f) {
        config::SimConfig c = cfg;
        c.controller.epsilon = cfg.controller.epsilon * f;
        return c;
      },
      max_threads);
}

// One full run per barrier coefficient alpha in (0,1].
inline std::vector<SweepRow> sweep_alpha(const config::SimConfig& cfg,
                                         const scenarios::WindProfile& wind,
                                         const std::vector<double>& alphas,
                                         unsigned max_threads = 1) {
  if (alphas.empty()) throw ConfigError("sweep_alpha: empty alpha list");
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("sweep_alpha: alpha out of (0,1]");
  }
  return detail::sweep(
      alphas, wind,
      [&](double a) {
        config::SimConfig c = cfg;
        c.controller.alpha = a;
        return c;
      },
      max_threads);
}

}  // namespace elycoord::metrics
