#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "elycoord/cubic_roots.hpp"
#include "elycoord/plant.hpp"
#include "elycoord/types.hpp"

// Discrete-time barrier algebra for the impurity limit. Requiring the
// next-step impurity to satisfy hto(t+1) <= (1-alpha)*hto(t) + alpha*hto_max
// is, after substituting the Euler plant model, a cubic inequality in the
// applied current:
//
//   k1*u^3 - k2*u^2 + k3*u + (k41 - k42) >= 0
//
// whose nonnegativity region intersected with the operational box is the
// per-unit admissible input set (at most two closed intervals).

namespace elycoord::cbf {

struct CbfCoefficients {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k41 = 0.0;
  double k42 = 0.0;

  double k4() const { return k41 - k42; }
  double scale() const {
    return std::max({std::abs(k1), std::abs(k2), std::abs(k3), std::abs(k4())});
  }
};

// Barrier value hto_max - hto(state); >= 0 iff the state is in the safe set.
inline double safe_value(const ElectrolyzerParams& p, const ElectrolyzerState& s) {
  return p.hto_max - plant::hto(p, s);
}

// Coefficients of the one-step barrier cubic at the current state. With
//   A = T - dt/(R_th*C_th)*(T - T_a)    (cooled temperature, before Joule term)
//   B = dt/C_th*(rho1 + rho2*T)         (Joule heating gain)
//   C = n_sep_g + n_sep_l*dt/tau        (gas moles before electrochemical purge)
//   D = eta_f*n_cell*dt/(2*z_h*F) * n_sep_g*T*R/(P*V_sep_g)   (purge gain)
// the cubic expands (T+*n_g+ next-step product) exactly; the temperatures that
// multiply gas moles follow the configured convention.
inline CbfCoefficients cbf_coefficients(const ElectrolyzerParams& p,
                                        const ElectrolyzerState& s, double t_a,
                                        double alpha, double dt) {
  double t_use = plant::hto_temperature(p, s.t_ele);
  double a = s.t_ele - dt / (p.r_th * p.c_th) * (s.t_ele - t_a);
  double a_use = p.absolute_temperature_in_hto ? a + kCelsiusOffset : a;
  double b = dt / p.c_th * (p.rho1 + p.rho2 * s.t_ele);
  double c = s.n_sep_g + s.n_sep_l * dt / p.tau_sep_l;
  double d = p.eta_f * p.n_cell * dt / (2.0 * p.z_h * p.faraday) * s.n_sep_g *
             t_use * p.gas_const / (p.pressure * p.v_sep_g);

  CbfCoefficients k;
  k.k1 = b * d;
  k.k2 = b * c;
  k.k3 = a_use * d;
  k.k41 = (1.0 - alpha) * t_use * s.n_sep_g +
          alpha * p.hto_max * p.pressure * p.v_sep_g / p.gas_const;
  k.k42 = a_use * c;
  return k;
}

inline double cubic_value(const CbfCoefficients& k, double u) {
  return ((k.k1 * u - k.k2) * u + k.k3) * u + k.k4();
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Nonnegativity region of the barrier cubic within the operational box: at
// most two disjoint closed intervals, ascending. u_minus() is the least
// admissible current (the feasibility certificate).
struct AdmissibleSet {
  int count = 0;
  std::array<Interval, 2> intervals{};

  bool empty() const { return count == 0; }
  double u_minus() const { return intervals[0].lo; }
  double u_max() const { return intervals[count - 1].hi; }

  bool contains(double u, double eps = 0.0) const {
    for (int i = 0; i < count; ++i) {
      if (u >= intervals[i].lo - eps && u <= intervals[i].hi + eps) return true;
    }
    return false;
  }
};

namespace detail {

// Walks an endpoint from `bad` (cubic possibly < 0 there after rounding)
// toward `good` (cubic > 0) until the cubic is nonnegative at the returned
// point. Keeps admissible endpoints honest: every returned endpoint satisfies
// the barrier inequality exactly, not just within a slack.
inline double refine_endpoint(const CbfCoefficients& k, double bad, double good) {
  if (cubic_value(k, bad) >= 0.0) return bad;
  double lo = bad;   // cubic < 0 here
  double hi = good;  // cubic > 0 here (segment midpoint)
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cubic_value(k, mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

// Exact sign decomposition of the barrier cubic over [box.lo, box.hi].
// Segments between real roots carry a constant sign; a segment is kept iff
// the cubic is strictly positive at its midpoint, and kept endpoints are then
// nudged inward until the cubic is nonnegative at them, so every point of the
// returned set genuinely satisfies the one-step condition. Membership
// *verification* elsewhere may use the looser cubic >= -tol*scale convention;
// extraction stays sign-exact. Coefficients below tol-scale thresholds are
// treated as zero so the startup case n_sep_g = 0 degrades to the closed-form
// quadratic/linear/constant regions.
inline AdmissibleSet nonneg_region(const CbfCoefficients& k, Interval box,
                                   double tol = 1e-11) {
  if (box.lo < 0.0) {
    throw std::invalid_argument("nonneg_region: box must start at a nonnegative current");
  }
  AdmissibleSet set;
  if (box.hi < box.lo) return set;

  double scale = k.scale();
  if (scale == 0.0) {
    // Identically zero cubic: 0 >= 0 everywhere.
    set.count = 1;
    set.intervals[0] = box;
    return set;
  }
  double zero_thresh = 1e-14 * scale;
  auto squash = [&](double v) { return std::abs(v) < zero_thresh ? 0.0 : v; };
  RealRoots roots =
      solve_cubic(squash(k.k1), squash(-k.k2), squash(k.k3), squash(k.k4()));

  // Breakpoints: box edges plus interior roots.
  std::array<double, 5> bp{};
  int n_bp = 0;
  bp[n_bp++] = box.lo;
  for (int i = 0; i < roots.count; ++i) {
    if (roots.values[i] > box.lo && roots.values[i] < box.hi) bp[n_bp++] = roots.values[i];
  }
  bp[n_bp++] = box.hi;

  // Keep strictly-positive segments, merging adjacent keeps across spurious
  // or tangential breakpoints.
  bool prev_kept = false;
  for (int s = 0; s + 1 < n_bp; ++s) {
    double lo = bp[s];
    double hi = bp[s + 1];
    double mid = 0.5 * (lo + hi);
    bool keep = cubic_value(k, mid) > 0.0;
    if (keep && prev_kept) {
      set.intervals[set.count - 1].hi = hi;
    } else if (keep) {
      if (set.count == 2) break;  // cannot happen for a cubic; defensive
      set.intervals[set.count++] = {lo, hi};
    }
    prev_kept = keep;
  }

  // Rounding rescue: if strict extraction found nothing but some segment sits
  // within the tolerance band around zero, keep the best such segment rather
  // than losing the feasibility certificate to floating-point dust.
  if (set.count == 0) {
    double best_val = -tol * scale;
    int best = -1;
    for (int s = 0; s + 1 < n_bp; ++s) {
      double v = cubic_value(k, 0.5 * (bp[s] + bp[s + 1]));
      if (v >= best_val) {
        best_val = v;
        best = s;
      }
    }
    if (best >= 0) {
      set.count = 1;
      set.intervals[0] = {bp[best], bp[best + 1]};
      return set;
    }
  }

  // Nudge root endpoints inward so the inequality holds at them exactly.
  for (int i = 0; i < set.count; ++i) {
    double mid = 0.5 * (set.intervals[i].lo + set.intervals[i].hi);
    set.intervals[i].lo = detail::refine_endpoint(k, set.intervals[i].lo, mid);
    set.intervals[i].hi = detail::refine_endpoint(k, set.intervals[i].hi, mid);
  }
  return set;
}

}  // namespace elycoord::cbf
