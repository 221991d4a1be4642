#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

// Real-root isolation for polynomials up to degree 3. Closed forms
// (trigonometric / Cardano) give candidates, a guarded Newton step polishes
// them, and a sign-change sweep over the monotone segments between critical
// points catches anything the closed form lost to cancellation. Roots are
// returned ascending and deduplicated; multiple roots appear once.

namespace elycoord {

struct RealRoots {
  int count = 0;
  std::array<double, 3> values{};

  void push(double x) {
    if (count < 3) values[count++] = x;
  }
};

namespace detail {

inline double eval_cubic(double a3, double a2, double a1, double a0, double x) {
  return ((a3 * x + a2) * x + a1) * x + a0;
}

inline double eval_cubic_deriv(double a3, double a2, double a1, double x) {
  return (3.0 * a3 * x + 2.0 * a2) * x + a1;
}

// Up to 8 Newton iterations; keeps the iterate with the smallest residual so a
// bad step can never make a candidate worse.
inline double polish_root(double a3, double a2, double a1, double a0, double x) {
  double best = x;
  double best_f = std::abs(eval_cubic(a3, a2, a1, a0, x));
  for (int it = 0; it < 8; ++it) {
    double f = eval_cubic(a3, a2, a1, a0, x);
    double df = eval_cubic_deriv(a3, a2, a1, x);
    if (df == 0.0) break;
    x -= f / df;
    if (!std::isfinite(x)) break;
    double fx = std::abs(eval_cubic(a3, a2, a1, a0, x));
    if (fx < best_f) {
      best_f = fx;
      best = x;
    }
  }
  return best;
}

inline double bisect_root(double a3, double a2, double a1, double a0, double lo,
                          double hi, double f_lo) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval collapsed to adjacent floats
    double f_mid = eval_cubic(a3, a2, a1, a0, mid);
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0.0) == (f_mid < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Roots of a1*x + a0 = 0. The identically-zero polynomial reports no roots.
inline RealRoots solve_linear(double a1, double a0) {
  RealRoots out;
  if (a1 != 0.0) out.push(-a0 / a1);
  return out;
}

// Real roots of a2*x^2 + a1*x + a0 = 0, ascending; a double root appears once.
inline RealRoots solve_quadratic(double a2, double a1, double a0) {
  if (a2 == 0.0) return solve_linear(a1, a0);
  RealRoots out;
  double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) return out;
  if (disc == 0.0) {
    out.push(-a1 / (2.0 * a2));
    return out;
  }
  // Citardauq pairing avoids cancellation when |a1| ~ sqrt(disc).
  double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
  double r1 = q / a2;
  double r2 = (q != 0.0) ? a0 / q : -a1 / (2.0 * a2);
  if (r1 > r2) std::swap(r1, r2);
  out.push(r1);
  if (r2 != r1) out.push(r2);
  return out;
}

// Real roots of a3*x^3 + a2*x^2 + a1*x + a0 = 0. An exactly-zero leading
// coefficient dispatches to the lower degree; near-zero thresholds are the
// caller's policy, not the solver's.
inline RealRoots solve_cubic(double a3, double a2, double a1, double a0) {
  if (a3 == 0.0) return solve_quadratic(a2, a1, a0);

  double p = a2 / a3;
  double q = a1 / a3;
  double r = a0 / a3;

  double big_q = (p * p - 3.0 * q) / 9.0;
  double big_r = (2.0 * p * p * p - 9.0 * p * q + 27.0 * r) / 54.0;

  // Closed-form candidates on the monic cubic.
  std::array<double, 3> cand{};
  int n_cand = 0;
  double r2 = big_r * big_r;
  double q3 = big_q * big_q * big_q;
  if (r2 <= q3) {
    if (big_q == 0.0) {
      cand[n_cand++] = -p / 3.0;  // triple root
    } else {
      double t = std::clamp(big_r / std::sqrt(q3), -1.0, 1.0);
      double theta = std::acos(t);
      double m = -2.0 * std::sqrt(big_q);
      constexpr double two_pi_3 = 2.0943951023931953;
      cand[n_cand++] = m * std::cos(theta / 3.0) - p / 3.0;
      cand[n_cand++] = m * std::cos(theta / 3.0 + two_pi_3) - p / 3.0;
      cand[n_cand++] = m * std::cos(theta / 3.0 - two_pi_3) - p / 3.0;
    }
  } else {
    double big_a =
        -std::copysign(std::cbrt(std::abs(big_r) + std::sqrt(r2 - q3)), big_r);
    double big_b = (big_a != 0.0) ? big_q / big_a : 0.0;
    cand[n_cand++] = big_a + big_b - p / 3.0;
  }
  for (int i = 0; i < n_cand; ++i) cand[i] = detail::polish_root(a3, a2, a1, a0, cand[i]);

  // Sign-change sweep: between consecutive critical points the cubic is
  // monotone, so each strict sign change brackets exactly one root. All real
  // roots of the monic form lie within the Cauchy bound.
  double bound = 1.0 + std::max({std::abs(p), std::abs(q), std::abs(r)});
  std::array<double, 4> cp{};
  int n_cp = 0;
  cp[n_cp++] = -bound;
  RealRoots crit = solve_quadratic(3.0, 2.0 * p, q);
  for (int i = 0; i < crit.count; ++i) {
    if (crit.values[i] > -bound && crit.values[i] < bound) cp[n_cp++] = crit.values[i];
  }
  cp[n_cp++] = bound;

  RealRoots out;
  // A candidate only short-circuits bisection when it lies in the bracket AND
  // its Newton step certifies convergence: near-degenerate cubics (e.g. a tiny
  // leading coefficient) put closed-form candidates in the right bracket with
  // the wrong value, and those must fall through to bisection.
  auto have_near = [&](double lo, double hi) {
    double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int i = 0; i < n_cand; ++i) {
      if (cand[i] < lo - slack || cand[i] > hi + slack) continue;
      double f = detail::eval_cubic(a3, a2, a1, a0, cand[i]);
      double df = detail::eval_cubic_deriv(a3, a2, a1, cand[i]);
      if (df != 0.0 &&
          std::abs(f / df) <= 1e-9 * std::max(1.0, std::abs(cand[i]))) {
        return cand[i];
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (int s = 0; s + 1 < n_cp; ++s) {
    double lo = cp[s];
    double hi = cp[s + 1];
    if (!(hi > lo)) continue;
    double f_lo = detail::eval_cubic(a3, a2, a1, a0, lo);
    double f_hi = detail::eval_cubic(a3, a2, a1, a0, hi);
    if (f_lo == 0.0) out.push(lo);
    if (f_lo * f_hi < 0.0) {
      double c = have_near(lo, hi);
      if (std::isnan(c)) {
        c = detail::polish_root(a3, a2, a1, a0,
                                detail::bisect_root(a3, a2, a1, a0, lo, hi, f_lo));
      }
      out.push(c);
    }
  }
  if (detail::eval_cubic(a3, a2, a1, a0, cp[n_cp - 1]) == 0.0) out.push(cp[n_cp - 1]);

  // Closed-form candidates with no sign change are even-multiplicity roots
  // (tangencies); keep the ones whose residual is genuinely small.
  double coef_scale =
      std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
  for (int i = 0; i < n_cand; ++i) {
    bool present = false;
    for (int j = 0; j < out.count; ++j) {
      if (std::abs(cand[i] - out.values[j]) <=
          1e-12 * std::max(1.0, std::abs(cand[i]))) {
        present = true;
        break;
      }
    }
    if (present) continue;
    double fscale = coef_scale * std::max(1.0, std::abs(cand[i]) * std::abs(cand[i]) *
                                                   std::abs(cand[i]));
    if (std::abs(detail::eval_cubic(a3, a2, a1, a0, cand[i])) <= 1e-10 * fscale) {
      out.push(cand[i]);
    }
  }

  std::sort(out.values.begin(), out.values.begin() + out.count);
  // Final dedupe (polish may have collapsed near-equal candidates).
  int w = 0;
  for (int i = 0; i < out.count; ++i) {
    if (w == 0 || std::abs(out.values[i] - out.values[w - 1]) >
                      1e-12 * std::max(1.0, std::abs(out.values[i]))) {
      out.values[w++] = out.values[i];
    }
  }
  out.count = w;
  return out;
}

}  // namespace elycoord
