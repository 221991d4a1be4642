#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "elycoord/types.hpp"

// Electrolyzer plant model: semi-empirical voltage curve, current/power
// capability limits, lumped thermal dynamics, and the three-compartment
// hydrogen-impurity dynamics, all stepped with explicit Euler at the
// controller's sampling period.

namespace elycoord::plant {

// Ohmic-like slope of the voltage curve at temperature t [degC]. Must stay
// positive for the model to be valid (rho2 <= 0 caps the usable temperature).
inline double ohmic_slope(const ElectrolyzerParams& p, double t_ele) {
  return p.rho1 + p.rho2 * t_ele;
}

// Temperature entering the gas-side impurity expressions; everything else
// (thermal model, voltage) stays in degC regardless of the flag.
inline double hto_temperature(const ElectrolyzerParams& p, double t_ele) {
  return p.absolute_temperature_in_hto ? t_ele + kCelsiusOffset : t_ele;
}

// Stack voltage u_rev + (rho1 + rho2*T)*i [V].
inline double cell_voltage(const ElectrolyzerParams& p, double t_ele, double i) {
  if (i < 0.0) throw std::invalid_argument("cell_voltage: negative current");
  return p.u_rev + ohmic_slope(p, t_ele) * i;
}

// Largest current that keeps the stack below n_cell*u_limit volts.
inline double max_current(const ElectrolyzerParams& p, double t_ele) {
  double slope = ohmic_slope(p, t_ele);
  if (slope <= 0.0) {
    throw ModelError("max_current: voltage slope rho1 + rho2*T is not positive");
  }
  return (p.n_cell * p.u_limit - p.u_rev) / slope;
}

// Power consumed at the voltage ceiling: u_max * i_max [W].
inline double max_power(const ElectrolyzerParams& p, double t_ele) {
  return p.n_cell * p.u_limit * max_current(p, t_ele);
}

// Instantaneous electric power u(T, i) * i [W].
inline double electrolyzer_power(const ElectrolyzerParams& p, double t_ele, double i) {
  return cell_voltage(p, t_ele, i) * i;
}

// Hydrogen crossover into the oxygen stream, affine in current and clamped at
// zero [mol/s].
inline double crossover_rate(const ElectrolyzerParams& p, double i) {
  if (i < 0.0) throw std::invalid_argument("crossover_rate: negative current");
  return std::max(0.0, p.cross_c0 + p.cross_c1 * i);
}

// Oxygen production rate eta_f*n_cell*i/(2*z_h*F) [mol/s].
inline double oxygen_rate(const ElectrolyzerParams& p, double i) {
  return p.eta_f * p.n_cell * i / (2.0 * p.z_h * p.faraday);
}

// Hydrogen-to-oxygen fraction in the separator head space:
// T*n_sep_g*R/(P*V_sep_g), with T per the temperature-convention flag.
inline double hto(const ElectrolyzerParams& p, const ElectrolyzerState& s) {
  return hto_temperature(p, s.t_ele) * s.n_sep_g * p.gas_const /
         (p.pressure * p.v_sep_g);
}

struct StepResult {
  ElectrolyzerState state;
  int clamped = 0;  // number of mole fields clamped at zero this step
};

// One explicit-Euler step of the coupled thermal + impurity dynamics under a
// zero-order-held current i over [t, t+dt). Mole inventories are clamped at
// zero with a diagnostic count rather than allowed to go negative.
inline StepResult step(const ElectrolyzerParams& p, const ElectrolyzerState& s,
                       double i, double t_a, double dt) {
  if (i < 0.0) throw std::invalid_argument("step: negative current");
  if (dt <= 0.0) throw std::invalid_argument("step: nonpositive dt");

  StepResult out;
  out.state.t_ele = s.t_ele - dt / (p.r_th * p.c_th) * (s.t_ele - t_a) +
                    dt / p.c_th * ohmic_slope(p, s.t_ele) * i * i;

  double cross = crossover_rate(p, i);
  double an_out = s.n_an * p.v_lye / (2.0 * p.v_an);
  double liq_out = s.n_sep_l / p.tau_sep_l;
  // Gas leaves the head space proportionally to its own partial pressure:
  // rate = eta_f*n_cell*u/(2*z_h*F) * T*n_sep_g*R/(P*V_sep_g).
  double gas_out = p.eta_f * p.n_cell * s.n_sep_g *
                   hto_temperature(p, s.t_ele) * p.gas_const * i /
                   (2.0 * p.z_h * p.faraday * p.pressure * p.v_sep_g);

  out.state.n_an = s.n_an + (cross - an_out) * dt;
  out.state.n_sep_l = s.n_sep_l + (an_out - liq_out) * dt;
  out.state.n_sep_g = s.n_sep_g + (liq_out - gas_out) * dt;

  for (double* n : {&out.state.n_an, &out.state.n_sep_l, &out.state.n_sep_g}) {
    if (*n < 0.0) {
      *n = 0.0;
      ++out.clamped;
    }
  }
  return out;
}

// Long-run impurity under sustained constant current i > 0. In steady state
// every compartment passes the crossover flow through, and the gas outflow
// equals oxygen_rate * hto, so hto settles at crossover/oxygen independent of
// temperature (and of the temperature-convention flag).
inline double steady_hto(const ElectrolyzerParams& p, double i) {
  if (i <= 0.0) throw std::invalid_argument("steady_hto: current must be positive");
  return crossover_rate(p, i) / oxygen_rate(p, i);
}

// Total cluster power capability at a common reference temperature; used as
// the cluster rating for wind scaling and power tolerances.
inline double cluster_rated_power(std::span<const ElectrolyzerParams> params,
                                  double t_nominal = 60.0) {
  double total = 0.0;
  for (const auto& p : params) total += max_power(p, t_nominal);
  return total;
}

}  // namespace elycoord::plant
