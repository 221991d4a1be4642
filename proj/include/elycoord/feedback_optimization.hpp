#pragma once

#include <span>
#include <vector>

#include "elycoord/plant.hpp"
#include "elycoord/types.hpp"

// Feedback-optimization reference generator. The controller descends the
// gradient of a steady-state surrogate of cluster power against the wind
// budget; the surrogate is built at ambient temperature (the steady-state
// map), never at the instantaneous plant temperature — the gap between the
// two is what the feedback loop absorbs.

namespace elycoord::fo {

struct SteadyMapEval {
  double h = 0.0;      // steady power at current u [W]
  double dh_du = 0.0;  // gradient of the steady power map [W/A]
  double t_hat = 0.0;  // steady temperature at current u [degC]
};

// Fixed point of the thermal dynamics under constant current u:
// (T_a + R_th*rho1*u^2) / (1 - R_th*rho2*u^2).
inline double steady_temperature(const ElectrolyzerParams& p, double u, double t_a) {
  double denom = 1.0 - p.r_th * p.rho2 * u * u;
  if (denom <= 0.0) {
    throw ModelError("steady_temperature: thermal fixed point does not exist");
  }
  return (t_a + p.r_th * p.rho1 * u * u) / denom;
}

// Steady-state input-output power map
// h(u) = u_rev*u + (rho1 + rho2*T_a)*u^2 / (1 - R_th*rho2*u^2),
// identically electrolyzer_power(p, steady_temperature(u), u).
inline double steady_power(const ElectrolyzerParams& p, double u, double t_a) {
  double denom = 1.0 - p.r_th * p.rho2 * u * u;
  if (denom <= 0.0) throw ModelError("steady_power: outside the map's domain");
  return p.u_rev * u + (p.rho1 + p.rho2 * t_a) * u * u / denom;
}

// dh/du = u_rev + 2*(rho1 + rho2*T_a)*u / (1 - R_th*rho2*u^2)^2; strictly
// positive on u >= 0 whenever rho1 + rho2*T_a > 0.
inline double steady_power_gradient(const ElectrolyzerParams& p, double u, double t_a) {
  double denom = 1.0 - p.r_th * p.rho2 * u * u;
  if (denom <= 0.0) throw ModelError("steady_power_gradient: outside the map's domain");
  return p.u_rev + 2.0 * (p.rho1 + p.rho2 * t_a) * u / (denom * denom);
}

inline SteadyMapEval eval_steady_map(const ElectrolyzerParams& p, double u, double t_a) {
  return {steady_power(p, u, t_a), steady_power_gradient(p, u, t_a),
          steady_temperature(p, u, t_a)};
}

// Power mismatch e = sum_i h_i(u_i) - p_wind [W].
inline double power_mismatch(std::span<const double> us,
                             std::span<const ElectrolyzerParams> params,
                             double t_a, double p_wind) {
  double total = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    total += steady_power(params[i], us[i], t_a);
  }
  return total - p_wind;
}

// One sampled gradient step: u_des_i = u_i - epsilon*dt*(dh_i/du)*e.
// Deliberately unconstrained — components may go negative or exceed limits;
// enforcing bounds is the safety layer's job.
inline std::vector<double> fo_update(std::span<const double> us,
                                     std::span<const ElectrolyzerParams> params,
                                     double t_a, double p_wind,
                                     const ControllerParams& ctrl) {
  double e = power_mismatch(us, params, t_a, p_wind);
  std::vector<double> u_des(us.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    u_des[i] = us[i] - ctrl.epsilon * ctrl.dt *
                           steady_power_gradient(params[i], us[i], t_a) * e;
  }
  return u_des;
}

}  // namespace elycoord::fo
