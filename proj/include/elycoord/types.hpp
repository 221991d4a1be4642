#pragma once

#include <stdexcept>
#include <string>

namespace elycoord {

// Offset between the Celsius scale used for stored temperatures and the
// absolute scale some gas-side expressions may opt into (see
// ElectrolyzerParams::absolute_temperature_in_hto).
inline constexpr double kCelsiusOffset = 273.15;

// Configuration file / input data problems: bad schema, bad values, bad files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The model left its domain of validity (e.g. ohmic slope nonpositive at the
// requested temperature, unsafe initial state).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a per-unit admissible set is empty, i.e. even the relaxed
// coordination problem has no solution. There is no recovery policy; the
// simulation stops loudly.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Static description of one alkaline electrolyzer stack and its gas loop.
// Voltage model: u = u_rev + (rho1 + rho2*T)*i with rho2 <= 0, valid while
// rho1 + rho2*T > 0.
struct ElectrolyzerParams {
  int n_cell = 45;          // cells in series
  double u_limit = 2.1;     // per-cell voltage ceiling [V]
  double rho1 = 3.11;       // ohmic coefficient [ohm]
  double rho2 = -0.025;     // ohmic temperature slope [ohm/degC], <= 0
  double u_rev = 55.305;    // stack reversible voltage [V] (1.229 V x n_cell)
  double r_th = 0.054;      // lumped thermal resistance [degC/W]
  double c_th = 15000.0;    // lumped thermal capacitance [J/degC]
  double eta_f = 1.0;       // Faraday efficiency, (0, 1]
  double z_h = 2.0;         // electrons per H2 molecule
  double faraday = 96485.0; // Faraday constant [C/mol]
  double gas_const = 8.314; // molar gas constant [J/(mol K)]
  double pressure = 1.0e5;  // separator head-space pressure [Pa]
  double v_an = 0.005;      // anolyte compartment volume [m^3]
  double v_sep_g = 0.01;    // separator gas head-space volume [m^3]
  double tau_sep_l = 300.0; // separator liquid residence time [s]
  double v_lye = 1.0e-4;    // lye circulation rate [m^3/s]
  double cross_c0 = 3.4e-6;       // H2 crossover at zero current [mol/s]
  double cross_c1 = 9.3536e-7;    // H2 crossover slope [mol/(s A)]
  double delta_i_max = 4.868944099378882; // current ramp limit [A/s]
  double hto_max = 0.02;    // impurity ceiling (fraction of H2 in O2 stream)
  // When true, the impurity expressions use T + 273.15 wherever temperature
  // multiplies the separator gas inventory; the thermal and voltage models
  // always stay on the Celsius scale. Default follows the literal model.
  bool absolute_temperature_in_hto = false;
};

// Dynamic state of one unit: stack temperature plus the three-compartment
// hydrogen inventory on the oxygen side (anolyte -> separator liquid ->
// separator gas).
struct ElectrolyzerState {
  double t_ele = 25.0;    // stack temperature [degC]
  double n_an = 0.0;      // dissolved H2 in the anolyte [mol]
  double n_sep_l = 0.0;   // dissolved H2 in the separator liquid [mol]
  double n_sep_g = 0.0;   // gaseous H2 in the separator head space [mol]
};

struct ControllerParams {
  double epsilon = 1.0e-5; // feedback-optimization gain
  double alpha = 0.8;      // barrier decay coefficient, (0, 1]
  double dt = 1.0;         // control and plant sampling period [s]
};

}  // namespace elycoord
