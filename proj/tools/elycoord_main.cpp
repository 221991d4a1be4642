// Command-line front end: simulate | repdays | sweep-gain | sweep-alpha |
// report | calibrate.
//
// Exit codes: 0 on success, 1 when a run aborts on a safety/feasibility or
// internal model error, 2 on bad usage, bad config, or malformed input files.
//
// Default outputs contain no wall-clock data, so rerunning any command with
// the same inputs produces byte-identical files; pass --timings to opt in to
// solve-time columns.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elycoord/config.hpp"
#include "elycoord/io.hpp"
#include "elycoord/metrics.hpp"
#include "elycoord/scenarios.hpp"
#include "elycoord/sim.hpp"

namespace {

using namespace elycoord;

unsigned sweep_thread_cap() {
  if (const char* env = std::getenv("ELECTRO_COORD_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigError("ELECTRO_COORD_THREADS must be a positive integer");
    }
    return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Loads the wind CSV named on the command line (or in the config), applies
// the configured scaling on the full profile, then slices/resamples to match
// the controller period. Scaling before slicing keeps day slices of one
// profile on a common scale.
scenarios::WindProfile prepare_wind(const config::SimConfig& cfg,
                                    const std::string& wind_arg, long day) {
  std::string path = wind_arg.empty() ? cfg.wind_source.path : wind_arg;
  if (path.empty()) {
    throw ConfigError("no wind profile: pass --wind or set wind_source.path");
  }
  scenarios::WindProfile w = scenarios::load_wind_csv(path, cfg.controller.dt);
  if (cfg.wind_source.scaling == "cluster_rating") {
    w = scenarios::scale_profile(std::move(w),
                                 plant::cluster_rated_power(cfg.electrolyzers));
  } else if (cfg.wind_source.scaling == "peak") {
    w = scenarios::scale_profile(std::move(w), cfg.wind_source.target_peak_w);
  }
  if (day >= 0) w = scenarios::slice_day(w, day);
  if (std::abs(w.dt - cfg.controller.dt) > 1e-9 * cfg.controller.dt) {
    w = scenarios::resample_hold(w, cfg.controller.dt);
  }
  return w;
}

void print_run_summary(const sim::Trace& trace, const metrics::RunMetrics& m,
                       bool timings) {
  std::printf("steps                %zu\n", trace.steps.size());
  std::printf("energy_utilization   %.6f\n", m.energy_utilization);
  std::printf("storage_energy_wh    %.3f\n", m.storage_energy_wh);
  std::printf("hto_peak             %.6g\n", m.hto_peak);
  std::printf("hto_violations       %ld\n", m.hto_violations);
  std::printf("relaxed_steps        %ld\n", m.relaxed_steps);
  std::printf("clamp_events         %ld\n", m.clamp_events);
  if (timings) {
    std::printf("solve_time_avg_s     %.6g\n", m.solve_time.avg);
    std::printf("solve_time_p95_s     %.6g\n", m.solve_time.p95);
    std::printf("solve_time_max_s     %.6g\n", m.solve_time.max);
  }
}

int run_simulate(const std::string& config_path, const std::string& wind_arg,
                 const std::string& out_dir, long day, bool timings) {
  config::SimConfig cfg = config::load_config(config_path);
  scenarios::WindProfile wind = prepare_wind(cfg, wind_arg, day);
  if (static_cast<long>(wind.samples.size()) < cfg.horizon_steps) {
    throw ConfigError("wind profile provides " + std::to_string(wind.samples.size()) +
                      " steps, config horizon needs " +
                      std::to_string(cfg.horizon_steps));
  }
  sim::Trace trace = sim::run(cfg, wind);
  metrics::RunMetrics m = metrics::run_metrics(trace);
  metrics::ContractionDiagnostics diag = metrics::contraction_diagnostics(trace, cfg);

  std::filesystem::create_directories(out_dir);
  io::write_trace_csv(trace, out_dir + "/trace.csv", timings);
  io::write_trace_json(trace, out_dir + "/trace.json", timings);
  io::write_metrics_json(m, diag, out_dir + "/metrics.json", timings);
  print_run_summary(trace, m, timings);
  return 0;
}

int run_repdays(const std::string& wind_path, int k, std::uint64_t seed,
                const std::string& out_dir, int downsample, double dt_hint) {
  scenarios::WindProfile w = scenarios::load_wind_csv(wind_path, dt_hint);
  scenarios::RepresentativeDaySet set = scenarios::representative_days(w, k, seed, downsample);
  io::write_representative_days(set, out_dir);
  std::printf("k        %d\n", set.k);
  std::printf("days_in  %zu\n", set.assignments.size());
  std::printf("wcss     %.17g\n", set.wcss);
  for (int c = 0; c < set.k; ++c) {
    std::printf("day_%d    medoid=%ld weight=%d\n", c, set.medoid_indices[c],
                set.weights[c]);
  }
  return 0;
}

int run_sweep_gain(const std::string& config_path, const std::string& wind_arg,
                   const std::vector<double>& values, const std::string& out_csv,
                   long day) {
  config::SimConfig cfg = config::load_config(config_path);
  scenarios::WindProfile wind = prepare_wind(cfg, wind_arg, day);
  auto rows = metrics::sweep_gain(cfg, wind, values, sweep_thread_cap());
  io::write_sweep_gain_csv(rows, out_csv);
  std::printf("factor,energy_utilization\n");
  for (const auto& r : rows) {
    std::printf("%.6g,%.9f\n", r.value, r.metrics.energy_utilization);
  }
  return 0;
}

int run_sweep_alpha(const std::string& config_path, const std::string& wind_arg,
                    const std::vector<double>& values, const std::string& out_csv,
                    long day, bool timings) {
  config::SimConfig cfg = config::load_config(config_path);
  scenarios::WindProfile wind = prepare_wind(cfg, wind_arg, day);
  auto rows = metrics::sweep_alpha(cfg, wind, values, sweep_thread_cap());
  io::write_sweep_alpha_csv(rows, out_csv, timings);
  std::printf("alpha,storage_energy_wh%s\n", timings ? ",solve_time_avg_s" : "");
  for (const auto& r : rows) {
    std::printf("%.6g,%.6f", r.value, r.metrics.storage_energy_wh);
    if (timings) std::printf(",%.6g", r.metrics.solve_time.avg);
    std::printf("\n");
  }
  return 0;
}

int run_report(const std::string& trace_path) {
  io::TraceTable t = io::read_trace_csv(trace_path);
  const std::size_t n = t.p_wind.size();
  double served = 0.0, offered = 0.0, storage = 0.0;
  long relaxed = 0;
  for (std::size_t s = 0; s < n; ++s) {
    served += std::min(t.p_total[s], t.p_wind[s]);
    offered += t.p_wind[s];
    storage += t.storage_power[s];
    relaxed += t.relaxed[s] ? 1 : 0;
  }
  double utilization = offered > 0.0 ? served / offered : 1.0;
  double hto_peak = 0.0;
  long violations = 0;
  for (int i = 0; i < t.n_ele; ++i) {
    for (double h : t.hto[i]) {
      hto_peak = std::max(hto_peak, h);
      if (h > t.hto_max[i] + 1e-9) ++violations;
    }
  }
  std::printf("trace                %s\n", trace_path.c_str());
  std::printf("steps                %zu\n", n);
  std::printf("units                %d\n", t.n_ele);
  std::printf("dt_s                 %.6g\n", t.dt);
  std::printf("energy_utilization   %.6f\n", utilization);
  std::printf("storage_energy_wh    %.3f\n", storage * t.dt / 3600.0);
  std::printf("hto_peak             %.6g\n", hto_peak);
  std::printf("hto_violations       %ld\n", violations);
  std::printf("relaxed_steps        %ld\n", relaxed);
  if (t.has_solve_time) {
    std::vector<double> v = t.solve_time;
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(v.size())));
    std::printf("solve_time_avg_s     %.6g\n", sum / static_cast<double>(v.size()));
    std::printf("solve_time_p95_s     %.6g\n", v[std::max<std::size_t>(rank, 1) - 1]);
    std::printf("solve_time_max_s     %.6g\n", v.back());
  }
  return 0;
}

int run_calibrate(const std::string& config_path, double load_fraction,
                  double target_hto) {
  config::SimConfig cfg = config::load_config(config_path);
  for (int i = 0; i < cfg.n_ele; ++i) {
    const ElectrolyzerParams& p = cfg.electrolyzers[i];
    double c1 = config::calibrate_cross_c1(p, load_fraction, target_hto);
    ElectrolyzerParams q = p;
    q.cross_c1 = c1;
    double i_cal = load_fraction * plant::max_current(q, 60.0);
    std::printf("unit %d: cross_c1=%.17g steady_hto(%.3g A)=%.17g\n", i, c1, i_cal,
                plant::steady_hto(q, i_cal));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind-following coordination of alkaline electrolyzer clusters"};
  app.require_subcommand(1);

  std::string config_path, wind_path, out_path, trace_path;
  std::vector<double> values;
  long day = -1;
  bool timings = false;
  int k = 8;
  std::uint64_t seed = 12345;
  int downsample = 60;
  double dt_hint = 60.0;
  double load_fraction = 0.1;
  double target_hto = -1.0;

  auto* sim_cmd = app.add_subcommand("simulate", "Run the controller over a wind profile");
  sim_cmd->add_option("--config", config_path, "Cluster config JSON")->required();
  sim_cmd->add_option("--wind", wind_path, "Wind CSV (default: wind_source.path)");
  sim_cmd->add_option("--out", out_path, "Output directory")->required();
  sim_cmd->add_option("--day", day, "Simulate only this day of the profile");
  sim_cmd->add_flag("--timings", timings, "Include wall-clock solve times in outputs");

  auto* rep_cmd = app.add_subcommand("repdays", "Cluster an annual profile into representative days");
  rep_cmd->add_option("--wind", wind_path, "Annual wind CSV")->required();
  rep_cmd->add_option("--k", k, "Number of representative days");
  rep_cmd->add_option("--seed", seed, "Clustering RNG seed");
  rep_cmd->add_option("--out", out_path, "Output directory")->required();
  rep_cmd->add_option("--downsample", downsample, "Samples averaged per feature entry");
  rep_cmd->add_option("--dt-hint", dt_hint, "Sampling period when the CSV has no timestamps [s]");

  auto* gain_cmd = app.add_subcommand("sweep-gain", "Utilization vs. controller gain factor");
  gain_cmd->add_option("--config", config_path, "Cluster config JSON")->required();
  gain_cmd->add_option("--wind", wind_path, "Wind CSV (default: wind_source.path)");
  gain_cmd->add_option("--values", values, "Gain factors, comma separated")
      ->required()
      ->delimiter(',');
  gain_cmd->add_option("--out", out_path, "Output CSV")->required();
  gain_cmd->add_option("--day", day, "Sweep over only this day of the profile");

  auto* alpha_cmd = app.add_subcommand("sweep-alpha", "Storage use vs. barrier coefficient");
  alpha_cmd->add_option("--config", config_path, "Cluster config JSON")->required();
  alpha_cmd->add_option("--wind", wind_path, "Wind CSV (default: wind_source.path)");
  alpha_cmd->add_option("--values", values, "Alpha values in (0,1], comma separated")
      ->required()
      ->delimiter(',');
  alpha_cmd->add_option("--out", out_path, "Output CSV")->required();
  alpha_cmd->add_option("--day", day, "Sweep over only this day of the profile");
  alpha_cmd->add_flag("--timings", timings, "Include average solve time per alpha");

  auto* report_cmd = app.add_subcommand("report", "Summarize a trace CSV");
  report_cmd->add_option("--trace", trace_path, "Trace CSV from simulate")->required();

  auto* cal_cmd = app.add_subcommand("calibrate", "Fit the crossover slope to the low-load limit");
  cal_cmd->add_option("--config", config_path, "Cluster config JSON")->required();
  cal_cmd->add_option("--load-fraction", load_fraction, "Fraction of rated current at the limit");
  cal_cmd->add_option("--target-hto", target_hto, "Impurity level at the limit (default: hto_max)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sim_cmd)) {
      return run_simulate(config_path, wind_path, out_path, day, timings);
    }
    if (app.got_subcommand(rep_cmd)) {
      return run_repdays(wind_path, k, seed, out_path, downsample, dt_hint);
    }
    if (app.got_subcommand(gain_cmd)) {
      return run_sweep_gain(config_path, wind_path, values, out_path, day);
    }
    if (app.got_subcommand(alpha_cmd)) {
      return run_sweep_alpha(config_path, wind_path, values, out_path, day, timings);
    }
    if (app.got_subcommand(report_cmd)) {
      return run_report(trace_path);
    }
    if (app.got_subcommand(cal_cmd)) {
      return run_calibrate(config_path, load_fraction, target_hto);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "safety error: %s\n", e.what());
    return 1;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
