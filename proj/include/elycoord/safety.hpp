#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "elycoord/cbf.hpp"
#include "elycoord/plant.hpp"
#include "elycoord/types.hpp"

// Safety layer: operational box bounds per unit, the feasibility test for the
// coupled projection problem, and the projection itself — the minimal
// Euclidean correction of the desired currents onto the product of per-unit
// admissible sets subject to total power not exceeding the wind budget.

namespace elycoord::safety {

struct BoxBounds {
  double lower = 0.0;
  double upper = 0.0;
  // The four candidate upper bounds, kept for diagnostics.
  double ramp_cap = 0.0;
  double voltage_cap = 0.0;
  double current_cap = 0.0;
  double power_cap = 0.0;
  bool empty = false;
};

// Ramp/voltage/current/power box around the previous applied current. The
// voltage and current caps share the same algebra (the voltage ceiling is
// what limits current); the power cap is the nonnegative root of
// slope*u^2 + u_rev*u = P_max(T).
inline BoxBounds box_bounds(const ElectrolyzerParams& p, const ElectrolyzerState& s,
                            double u_prev, double dt) {
  double slope = plant::ohmic_slope(p, s.t_ele);
  if (slope <= 0.0) {
    throw ModelError("box_bounds: voltage slope rho1 + rho2*T is not positive");
  }
  BoxBounds b;
  b.ramp_cap = u_prev + p.delta_i_max * dt;
  b.voltage_cap = (p.n_cell * p.u_limit - p.u_rev) / slope;
  b.current_cap = plant::max_current(p, s.t_ele);
  double p_cap = plant::max_power(p, s.t_ele);
  b.power_cap =
      (-p.u_rev + std::sqrt(p.u_rev * p.u_rev + 4.0 * slope * p_cap)) / (2.0 * slope);
  b.lower = std::max(0.0, u_prev - p.delta_i_max * dt);
  b.upper = std::min({b.ramp_cap, b.voltage_cap, b.current_cap, b.power_cap});
  b.empty = b.upper < b.lower;
  return b;
}

struct FeasibilityReport {
  std::vector<bool> per_unit_nonempty;
  std::vector<double> u_minus;  // least admissible current per unit (0 if empty)
  double p_min_reach = 0.0;     // cluster power with every unit at its minimum
  double p_wind = 0.0;
  bool all_nonempty = false;
  bool proposition1_holds = false;  // all_nonempty && p_min_reach <= p_wind
  bool relaxed = false;             // the coupling must be dropped this step
};

// Feasibility of the coupled projection: every admissible set nonempty and
// the minimum reachable cluster power within the wind budget. Powers are
// instantaneous, at the units' present temperatures.
inline FeasibilityReport feasibility_check(std::span<const cbf::AdmissibleSet> sets,
                                           std::span<const ElectrolyzerParams> params,
                                           std::span<const ElectrolyzerState> states,
                                           double p_wind) {
  FeasibilityReport r;
  r.p_wind = p_wind;
  r.all_nonempty = true;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    bool nonempty = !sets[i].empty();
    r.per_unit_nonempty.push_back(nonempty);
    r.u_minus.push_back(nonempty ? sets[i].u_minus() : 0.0);
    if (nonempty) {
      r.p_min_reach +=
          plant::electrolyzer_power(params[i], states[i].t_ele, r.u_minus.back());
    } else {
      r.all_nonempty = false;
    }
  }
  r.proposition1_holds = r.all_nonempty && r.p_min_reach <= p_wind;
  r.relaxed = !r.proposition1_holds;
  return r;
}

struct ProjectionResult {
  std::vector<double> u;
  double objective = 0.0;       // 0.5*||u - u_des||^2
  double power_residual = 0.0;  // sum P(u) - p_wind (signed; <= 0 means slack)
  double lambda = 0.0;          // multiplier of the coupling constraint
  bool coupling_active = false;
  bool relaxed = false;
  int combinations = 0;  // interval combinations evaluated in stage 2
};

namespace detail {

// Index of the interval whose clamp of x is nearest; equidistant candidates
// resolve to the smaller current (intervals are ascending, first win is kept).
inline int nearest_interval_index(const cbf::AdmissibleSet& set, double x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < set.count; ++i) {
    double c = std::clamp(x, set.intervals[i].lo, set.intervals[i].hi);
    double d = std::abs(c - x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline double nearest_in_set(const cbf::AdmissibleSet& set, double x) {
  const cbf::Interval& iv = set.intervals[nearest_interval_index(set, x)];
  return std::clamp(x, iv.lo, iv.hi);
}

}  // namespace detail

// Euclidean projection of u_des onto { u : u_i in U_i, sum_i P_i(u_i) <= p_wind }
// (the coupling bound is dropped when relaxed = true).
//
// Stage 1 projects each component independently onto its union of intervals;
// if that already satisfies the coupling, it is the exact answer. Otherwise,
// for every combination of one interval per unit, the restricted problem is
// convex and solved exactly by bisection on the Lagrange multiplier of the
// coupling constraint: the per-unit minimizer is
//   u_i(lambda) = clamp((u_des_i - lambda*u_rev_i)/(1 + 2*lambda*b_i), lo_i, hi_i),
// with b_i the ohmic slope at the unit's temperature, and total power along
// that path is monotone nonincreasing in lambda. The best combination wins;
// the all-lower-endpoints combination is feasible whenever the feasibility
// check passed, so the solve cannot come up empty. Combinations grow as
// 2^(#units whose set is split in two); beyond 12 such units the extras stay
// pinned to their stage-1 interval (never reached at the target scale).
inline ProjectionResult project(std::span<const double> u_des,
                                std::span<const cbf::AdmissibleSet> sets,
                                std::span<const ElectrolyzerParams> params,
                                std::span<const ElectrolyzerState> states,
                                double p_wind, bool relaxed, double tol_power) {
  const std::size_t n = u_des.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (sets[i].empty()) {
      throw InfeasibleError("project: admissible set of unit " + std::to_string(i) +
                            " is empty (no relaxation can recover this)");
    }
  }

  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = plant::ohmic_slope(params[i], states[i].t_ele);
    if (b[i] <= 0.0) throw ModelError("project: voltage slope not positive");
  }
  auto unit_power = [&](std::size_t i, double u) {
    return (params[i].u_rev + b[i] * u) * u;
  };

  ProjectionResult res;
  res.relaxed = relaxed;
  res.u.resize(n);

  // Stage 1: independent nearest points.
  double p_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res.u[i] = detail::nearest_in_set(sets[i], u_des[i]);
    p_total += unit_power(i, res.u[i]);
  }
  if (relaxed || p_total <= p_wind) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = res.u[i] - u_des[i];
      res.objective += 0.5 * d * d;
    }
    res.power_residual = p_total - p_wind;
    return res;
  }

  // Stage 2: coupling is binding.
  res.coupling_active = true;
  std::vector<std::size_t> split;  // units with two intervals, first 12 enumerated
  for (std::size_t i = 0; i < n; ++i) {
    if (sets[i].count == 2 && split.size() < 12) split.push_back(i);
  }
  const std::uint32_t n_combos = 1u << split.size();

  std::vector<double> lo(n), hi(n), u_try(n), u_best;
  double best_obj = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  double best_residual = 0.0;

  for (std::uint32_t combo = 0; combo < n_combos; ++combo) {
    for (std::size_t i = 0; i < n; ++i) {
      int which = 0;
      if (sets[i].count == 2) {
        auto it = std::find(split.begin(), split.end(), i);
        if (it != split.end()) {
          which = static_cast<int>((combo >> (it - split.begin())) & 1u);
        } else {
          which = detail::nearest_interval_index(sets[i], u_des[i]);
        }
      }
      lo[i] = sets[i].intervals[which].lo;
      hi[i] = sets[i].intervals[which].hi;
    }

    double p_lo = 0.0;
    for (std::size_t i = 0; i < n; ++i) p_lo += unit_power(i, lo[i]);
    if (p_lo > p_wind) continue;  // this combination cannot meet the budget

    auto eval = [&](double lambda) {
      double p = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        u_try[i] = std::clamp((u_des[i] - lambda * params[i].u_rev) /
                                  (1.0 + 2.0 * lambda * b[i]),
                              lo[i], hi[i]);
        p += unit_power(i, u_try[i]);
      }
      return p;
    };

    double lambda = 0.0;
    double p_at = eval(0.0);
    if (p_at > p_wind) {
      double lam_lo = 0.0;
      double lam_hi = 1.0;
      int guard = 0;
      while (eval(lam_hi) > p_wind && ++guard < 200) {
        lam_lo = lam_hi;
        lam_hi *= 2.0;
      }
      for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lam_lo + lam_hi);
        if (eval(mid) > p_wind) {
          lam_lo = mid;
        } else {
          lam_hi = mid;
        }
      }
      p_at = eval(lam_hi);  // feasible end of the bracket
      lambda = lam_hi;
    }

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = u_try[i] - u_des[i];
      obj += 0.5 * d * d;
    }
    ++res.combinations;
    if (obj < best_obj) {
      best_obj = obj;
      u_best = u_try;
      best_lambda = lambda;
      best_residual = p_at - p_wind;
    }
  }

  if (u_best.empty()) {
    throw InfeasibleError(
        "project: no interval combination meets the power budget (feasibility "
        "check should have routed this step to the relaxed branch)");
  }
  if (best_residual > tol_power) {
    throw InfeasibleError("project: coupling residual above tolerance");
  }
  res.u = std::move(u_best);
  res.objective = best_obj;
  res.lambda = best_lambda;
  res.power_residual = best_residual;
  return res;
}

// Exhaustive grid minimizer over the product of admissible sets subject to
// the coupling bound; the test oracle for project. Grids anchor at each
// interval's lower endpoint and always include the upper endpoint. Intended
// for n <= 3 only (cost is (width/step)^n).
inline std::vector<double> brute_force_project(
    std::span<const double> u_des, std::span<const cbf::AdmissibleSet> sets,
    std::span<const ElectrolyzerParams> params,
    std::span<const ElectrolyzerState> states, double p_wind, bool relaxed,
    double grid_step) {
  const std::size_t n = u_des.size();
  if (n > 4) throw std::invalid_argument("brute_force_project: too many units");

  std::vector<std::vector<double>> grid(n);
  std::vector<std::vector<double>> power(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sets[i].empty()) throw InfeasibleError("brute_force_project: empty set");
    double slope = plant::ohmic_slope(params[i], states[i].t_ele);
    for (int k = 0; k < sets[i].count; ++k) {
      double lo = sets[i].intervals[k].lo;
      double hi = sets[i].intervals[k].hi;
      long steps = static_cast<long>(std::floor((hi - lo) / grid_step));
      for (long s = 0; s <= steps; ++s) grid[i].push_back(lo + s * grid_step);
      if (grid[i].back() < hi) grid[i].push_back(hi);
    }
    for (double u : grid[i]) power[i].push_back((params[i].u_rev + slope * u) * u);
  }

  std::vector<std::size_t> idx(n, 0);
  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  while (true) {
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) p += power[i][idx[i]];
    if (relaxed || p <= p_wind) {
      double obj = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = grid[i][idx[i]] - u_des[i];
        obj += 0.5 * d * d;
      }
      if (obj < best_obj) {
        best_obj = obj;
        best.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) best[i] = grid[i][idx[i]];
      }
    }
    std::size_t carry = 0;
    while (carry < n && ++idx[carry] == grid[carry].size()) {
      idx[carry] = 0;
      ++carry;
    }
    if (carry == n) break;
  }
  if (best.empty()) throw InfeasibleError("brute_force_project: no feasible grid point");
  return best;
}

}  // namespace elycoord::safety
