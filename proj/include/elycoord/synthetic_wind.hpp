#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "elycoord/scenarios.hpp"

// Deterministic synthetic wind-power generator: seasonal and diurnal cycles
// plus two Ornstein-Uhlenbeck noise processes (hours-scale gusts and a
// days-scale weather band), normalized to a unit peak. Real measured data is
// preferable when available; this exists so the pipeline ships runnable
// without a dataset.

namespace elycoord::scenarios {

inline WindProfile synthetic_annual_wind(std::uint64_t seed, int days = 365,
                                         long samples_per_day = 1440,
                                         double dt = 60.0) {
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    // Box-Muller on raw deterministic draws; u1 kept away from zero.
    double u1 = 1.0 - detail::next_double(rng);
    double u2 = detail::next_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };

  WindProfile w;
  w.dt = dt;
  w.label = "synthetic";
  w.samples.reserve(static_cast<std::size_t>(days) * samples_per_day);

  double gust = 0.0;     // OU, correlation ~3 h
  double weather = 0.0;  // OU, correlation ~2.5 days
  const double dt_h = dt / 3600.0;
  const double tau_gust = 3.0;
  const double tau_weather = 60.0;
  const double sig_gust = 0.10;
  const double sig_weather = 0.22;

  for (int d = 0; d < days; ++d) {
    double season = 0.45 + 0.22 * std::sin(6.283185307179586 * (d + 290.0) / 365.25);
    for (long s = 0; s < samples_per_day; ++s) {
      double hour = static_cast<double>(s) * dt / 3600.0;
      double diurnal = 0.10 * std::sin(6.283185307179586 * (hour - 14.0) / 24.0);
      gust += (-gust / tau_gust) * dt_h + sig_gust * std::sqrt(dt_h / tau_gust) * gauss();
      weather += (-weather / tau_weather) * dt_h +
                 sig_weather * std::sqrt(dt_h / tau_weather) * gauss();
      w.samples.push_back(std::max(0.0, season + diurnal + gust + weather));
    }
  }
  double peak = *std::max_element(w.samples.begin(), w.samples.end());
  for (double& s : w.samples) s /= peak;
  return w;
}

}  // namespace elycoord::scenarios
