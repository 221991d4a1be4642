#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "elycoord/types.hpp"

// Wind-data handling: CSV ingestion, scaling to the cluster rating, day
// slicing/resampling, and K-means extraction of representative days.
//
// Determinism contract for everything seeded here: std::mt19937_64 with raw
// draws only — uniform integers via modulo, uniform doubles via
// (rng() >> 11) * 2^-53 — because std::uniform_*_distribution implementations
// differ across standard libraries.

namespace elycoord::scenarios {

struct WindProfile {
  double dt = 1.0;              // sampling period [s]
  std::vector<double> samples;  // wind power [W], nonnegative
  std::string label;
  int clamped_negative = 0;     // readings clamped to zero on load
};

// CSV with header `timestamp,power_w` (uniform timestamps, dt inferred) or
// `power_w` (dt taken from dt_hint). Lines starting with '#' are ignored.
inline WindProfile load_wind_csv(const std::string& path, double dt_hint = 1.0) {
  std::ifstream in(path);
  if (!in) throw ConfigError("wind file not found: " + path);

  WindProfile w;
  w.label = std::filesystem::path(path).filename().string();

  std::string line;
  bool have_header = false;
  bool with_timestamp = false;
  std::vector<double> timestamps;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      if (line == "timestamp,power_w") {
        with_timestamp = true;
      } else if (line != "power_w") {
        throw ConfigError(path + ": unrecognized wind CSV header '" + line + "'");
      }
      have_header = true;
      continue;
    }
    std::size_t comma = line.find(',');
    try {
      if (with_timestamp) {
        if (comma == std::string::npos) throw std::invalid_argument("missing column");
        timestamps.push_back(std::stod(line.substr(0, comma)));
        w.samples.push_back(std::stod(line.substr(comma + 1)));
      } else {
        w.samples.push_back(std::stod(line));
      }
    } catch (const std::exception&) {
      throw ConfigError(path + ": malformed wind CSV row '" + line + "'");
    }
  }
  if (w.samples.empty()) throw ConfigError(path + ": empty wind file");

  if (with_timestamp) {
    if (timestamps.size() < 2) throw ConfigError(path + ": need at least two rows to infer dt");
    w.dt = timestamps[1] - timestamps[0];
    if (!(w.dt > 0.0)) throw ConfigError(path + ": non-increasing timestamps");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (std::abs(timestamps[i] - timestamps[i - 1] - w.dt) > 1e-6 * w.dt) {
        throw ConfigError(path + ": non-uniform timestamps at row " + std::to_string(i));
      }
    }
  } else {
    if (!(dt_hint > 0.0)) throw ConfigError("load_wind_csv: dt_hint must be positive");
    w.dt = dt_hint;
  }

  for (double& s : w.samples) {
    if (s < 0.0) {
      s = 0.0;
      ++w.clamped_negative;
    }
  }
  return w;
}

// Multiplies all samples so the peak hits target_peak [W].
inline WindProfile scale_profile(WindProfile w, double target_peak) {
  double peak = *std::max_element(w.samples.begin(), w.samples.end());
  if (!(peak > 0.0)) throw ConfigError("scale_profile: degenerate (all-zero) profile");
  double f = target_peak / peak;
  for (double& s : w.samples) s *= f;
  return w;
}

inline long samples_per_day(const WindProfile& w) {
  double spd = 86400.0 / w.dt;
  long n = std::lround(spd);
  if (std::abs(spd - n) > 1e-6) {
    throw ConfigError("wind profile dt does not divide a day");
  }
  return n;
}

inline WindProfile slice_day(const WindProfile& w, long day_index) {
  long spd = samples_per_day(w);
  long n_days = static_cast<long>(w.samples.size()) / spd;
  if (day_index < 0 || day_index >= n_days) {
    throw ConfigError("slice_day: day index " + std::to_string(day_index) +
                      " out of range (have " + std::to_string(n_days) + " days)");
  }
  WindProfile day;
  day.dt = w.dt;
  day.label = w.label + "#day" + std::to_string(day_index);
  day.samples.assign(w.samples.begin() + day_index * spd,
                     w.samples.begin() + (day_index + 1) * spd);
  return day;
}

// Zero-order-hold resampling to a new sampling period (same total duration).
inline WindProfile resample_hold(const WindProfile& w, double new_dt) {
  if (!(new_dt > 0.0)) throw ConfigError("resample_hold: dt must be positive");
  WindProfile out;
  out.dt = new_dt;
  out.label = w.label;
  double duration = static_cast<double>(w.samples.size()) * w.dt;
  long m = std::lround(duration / new_dt);
  out.samples.resize(m);
  for (long j = 0; j < m; ++j) {
    auto src = static_cast<std::size_t>(j * new_dt / w.dt + 1e-9);
    out.samples[j] = w.samples[std::min(src, w.samples.size() - 1)];
  }
  return out;
}

struct RepresentativeDaySet {
  int k = 0;
  std::vector<WindProfile> days;      // medoid days at full input resolution
  std::vector<long> medoid_indices;   // source day index of each medoid
  std::vector<int> weights;           // cluster sizes; sum = number of source days
  std::vector<int> assignments;       // source day -> cluster
  std::uint64_t seed = 0;
  double wcss = 0.0;                  // final within-cluster sum of squares
};

namespace detail {

inline double next_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    d2 += d * d;
  }
  return d2;
}

}  // namespace detail

// K-means over downsampled (block-averaged, unnormalized) daily power vectors:
// k-means++ seeding, Lloyd iterations with ties to the lowest index, empty
// clusters keep their previous centroid, termination on relative objective
// decrease < 1e-8 or 300 iterations. Each cluster is represented by its
// medoid — the member day nearest the centroid — returned at full resolution,
// so representative days are verbatim slices of the source data.
inline RepresentativeDaySet representative_days(const WindProfile& w, int k,
                                                std::uint64_t seed,
                                                int downsample_factor = 60) {
  long spd = samples_per_day(w);
  if (w.samples.size() % spd != 0) {
    throw ConfigError("representative_days: profile must span whole days");
  }
  long n_days = static_cast<long>(w.samples.size()) / spd;
  if (k < 1 || k > n_days) {
    throw ConfigError("representative_days: k must be in [1, number of days] (k=" +
                      std::to_string(k) + ", days=" + std::to_string(n_days) + ")");
  }
  if (downsample_factor < 1) throw ConfigError("representative_days: bad downsample factor");

  // Block-averaged features.
  long f_dim = (spd + downsample_factor - 1) / downsample_factor;
  std::vector<std::vector<double>> feat(n_days, std::vector<double>(f_dim, 0.0));
  for (long d = 0; d < n_days; ++d) {
    for (long f = 0; f < f_dim; ++f) {
      long lo = f * downsample_factor;
      long hi = std::min(lo + downsample_factor, spd);
      double sum = 0.0;
      for (long s = lo; s < hi; ++s) sum += w.samples[d * spd + s];
      feat[d][f] = sum / static_cast<double>(hi - lo);
    }
  }

  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  std::vector<std::vector<double>> centroids;
  centroids.push_back(feat[rng() % n_days]);
  std::vector<double> d2(n_days);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (long d = 0; d < n_days; ++d) {
      double best = detail::sq_dist(feat[d], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        best = std::min(best, detail::sq_dist(feat[d], centroids[c]));
      }
      d2[d] = best;
      total += best;
    }
    long pick = -1;
    if (total > 0.0) {
      double r = detail::next_double(rng) * total;
      double cum = 0.0;
      for (long d = 0; d < n_days; ++d) {
        cum += d2[d];
        if (cum >= r) {
          pick = d;
          break;
        }
      }
      if (pick < 0) pick = n_days - 1;
    } else {
      // All days coincide with existing centroids; take the lowest-index day
      // that is not already a centroid.
      for (long d = 0; d < n_days && pick < 0; ++d) {
        bool used = false;
        for (const auto& c : centroids) {
          if (c == feat[d]) used = true;
        }
        if (!used) pick = d;
      }
      if (pick < 0) pick = 0;
    }
    centroids.push_back(feat[pick]);
  }

  // Lloyd iterations.
  std::vector<int> assign(n_days, 0);
  double prev_wcss = std::numeric_limits<double>::infinity();
  double wcss = prev_wcss;
  for (int iter = 0; iter < 300; ++iter) {
    wcss = 0.0;
    for (long d = 0; d < n_days; ++d) {
      int best_c = 0;
      double best = detail::sq_dist(feat[d], centroids[0]);
      for (int c = 1; c < k; ++c) {
        double v = detail::sq_dist(feat[d], centroids[c]);
        if (v < best) {
          best = v;
          best_c = c;
        }
      }
      assign[d] = best_c;
      wcss += best;
    }
    if (prev_wcss - wcss < 1e-8 * std::max(prev_wcss, 1e-300) && iter > 0) break;
    prev_wcss = wcss;

    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(f_dim, 0.0);
      long count = 0;
      for (long d = 0; d < n_days; ++d) {
        if (assign[d] != c) continue;
        for (long f = 0; f < f_dim; ++f) mean[f] += feat[d][f];
        ++count;
      }
      if (count > 0) {
        for (long f = 0; f < f_dim; ++f) mean[f] /= static_cast<double>(count);
        centroids[c] = std::move(mean);
      }  // empty cluster: centroid unchanged
    }
  }

  RepresentativeDaySet set;
  set.k = k;
  set.seed = seed;
  set.wcss = wcss;
  set.assignments.assign(assign.begin(), assign.end());
  set.weights.assign(k, 0);
  for (long d = 0; d < n_days; ++d) ++set.weights[assign[d]];

  for (int c = 0; c < k; ++c) {
    long medoid = -1;
    double best = std::numeric_limits<double>::infinity();
    for (long d = 0; d < n_days; ++d) {
      if (assign[d] != c) continue;
      double v = detail::sq_dist(feat[d], centroids[c]);
      if (v < best) {
        best = v;
        medoid = d;
      }
    }
    if (medoid < 0) {
      // Empty cluster: fall back to the globally nearest day so the output
      // always carries k genuine days.
      for (long d = 0; d < n_days; ++d) {
        double v = detail::sq_dist(feat[d], centroids[c]);
        if (v < best) {
          best = v;
          medoid = d;
        }
      }
    }
    set.medoid_indices.push_back(medoid);
    set.days.push_back(slice_day(w, medoid));
  }
  return set;
}

}  // namespace elycoord::scenarios
