#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "elycoord/plant.hpp"

using namespace elycoord;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

TEST_CASE("voltage and capability limits", "[plant]") {
  ElectrolyzerParams p;
  // Frozen reference values for the default stack (independent arithmetic).
  CHECK(plant::cell_voltage(p, 25.0, 10.0) == Catch::Approx(80.155).epsilon(1e-13));
  CHECK(plant::max_current(p, 25.0) ==
        Catch::Approx(15.772635814889334).epsilon(1e-13));
  CHECK(plant::max_current(p, 60.0) ==
        Catch::Approx(24.344720496894407).epsilon(1e-13));
  CHECK(plant::max_power(p, 25.0) == Catch::Approx(1490.514084507042).epsilon(1e-13));
  CHECK(plant::max_power(p, 60.0) == Catch::Approx(2300.5760869565215).epsilon(1e-13));

  // Voltage at the capability limit is exactly the stack ceiling.
  double i_max = plant::max_current(p, 40.0);
  CHECK(plant::cell_voltage(p, 40.0, i_max) ==
        Catch::Approx(p.n_cell * p.u_limit).epsilon(1e-12));

  // Hotter stacks conduct more.
  CHECK(plant::max_current(p, 60.0) > plant::max_current(p, 25.0));

  CHECK_THROWS_AS(plant::cell_voltage(p, 25.0, -1.0), std::invalid_argument);
  // rho1 + rho2*T <= 0 leaves the model's domain.
  CHECK_THROWS_AS(plant::max_current(p, 130.0), ModelError);
}

TEST_CASE("gas rates", "[plant]") {
  ElectrolyzerParams p;
  CHECK(plant::oxygen_rate(p, 10.0) ==
        Catch::Approx(0.001165984349898948).epsilon(1e-13));
  CHECK(plant::crossover_rate(p, 0.0) == p.cross_c0);
  CHECK(plant::crossover_rate(p, 10.0) ==
        Catch::Approx(p.cross_c0 + 10.0 * p.cross_c1).epsilon(1e-13));

  // The affine crossover law is clamped at zero.
  ElectrolyzerParams neg = p;
  neg.cross_c0 = -1e-5;
  CHECK(plant::crossover_rate(neg, 0.0) == 0.0);
  CHECK(plant::crossover_rate(neg, 100.0) > 0.0);
}

TEST_CASE("one Euler step matches the frozen reference", "[plant]") {
  ElectrolyzerParams p;
  ElectrolyzerState s;
  s.t_ele = 47.3;
  s.n_an = 1.9e-3;
  s.n_sep_l = 5.2e-3;
  s.n_sep_g = 1.1e-2;

  CHECK(plant::hto(p, s) == Catch::Approx(0.004325774199999999).epsilon(1e-13));

  auto r = plant::step(p, s, 9.25, 25.0, 1.0);
  CHECK(r.clamped == 0);
  CHECK(r.state.t_ele == Catch::Approx(47.283463917052465).epsilon(1e-13));
  CHECK(r.state.n_an == Catch::Approx(0.00189305208).epsilon(1e-13));
  CHECK(r.state.n_sep_l == Catch::Approx(0.005201666666666666).epsilon(1e-13));
  CHECK(r.state.n_sep_g == Catch::Approx(0.011012667832191314).epsilon(1e-13));
  CHECK(plant::hto(p, r.state) == Catch::Approx(0.004329241820362425).epsilon(1e-13));
}

TEST_CASE("step agrees with an in-test transcription", "[plant]") {
  ElectrolyzerParams p;
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    ElectrolyzerState s;
    s.t_ele = uniform(rng, 20.0, 90.0);
    s.n_an = uniform(rng, 0.0, 0.05);
    s.n_sep_l = uniform(rng, 0.0, 0.05);
    s.n_sep_g = uniform(rng, 0.0, 0.05);
    double i = uniform(rng, 0.0, 30.0);
    double t_a = uniform(rng, 10.0, 35.0);
    double dt = uniform(rng, 0.1, 5.0);

    auto r = plant::step(p, s, i, t_a, dt);

    double slope = p.rho1 + p.rho2 * s.t_ele;
    double t_next = s.t_ele - dt / (p.r_th * p.c_th) * (s.t_ele - t_a) +
                    dt / p.c_th * slope * i * i;
    double cross = std::max(0.0, p.cross_c0 + p.cross_c1 * i);
    double an_out = s.n_an * p.v_lye / (2.0 * p.v_an);
    double liq_out = s.n_sep_l / p.tau_sep_l;
    double gas_out = p.eta_f * p.n_cell * i / (2.0 * p.z_h * p.faraday) *
                     (s.t_ele * s.n_sep_g * p.gas_const / (p.pressure * p.v_sep_g));

    REQUIRE(r.state.t_ele == Catch::Approx(t_next).margin(1e-12));
    REQUIRE(r.state.n_an ==
            Catch::Approx(s.n_an + dt * (cross - an_out)).margin(1e-15));
    REQUIRE(r.state.n_sep_l ==
            Catch::Approx(s.n_sep_l + dt * (an_out - liq_out)).margin(1e-15));
    REQUIRE(r.state.n_sep_g ==
            Catch::Approx(s.n_sep_g + dt * (liq_out - gas_out)).margin(1e-15));
  }
}

TEST_CASE("cooling at zero current follows the exact geometric law", "[plant]") {
  ElectrolyzerParams p;
  ElectrolyzerState s;
  s.t_ele = 80.0;
  double t_a = 25.0;
  double dt = 1.0;
  double decay = 1.0 - dt / (p.r_th * p.c_th);
  double gap = s.t_ele - t_a;
  for (int k = 0; k < 50; ++k) {
    s = plant::step(p, s, 0.0, t_a, dt).state;
    gap *= decay;
    REQUIRE(s.t_ele == Catch::Approx(t_a + gap).margin(1e-10));
  }
  CHECK(s.t_ele < 80.0);
  CHECK(s.t_ele > t_a);
}

TEST_CASE("mole inventories clamp at zero with a diagnostic count", "[plant]") {
  ElectrolyzerParams p;
  p.cross_c0 = 0.0;
  p.cross_c1 = 0.0;
  ElectrolyzerState s;
  s.t_ele = 60.0;
  s.n_an = 1e-9;
  // Outflow exceeds the inventory over a long step: the state clamps.
  auto r = plant::step(p, s, 0.0, 25.0, 500.0);
  CHECK(r.state.n_an == 0.0);
  CHECK(r.clamped == 1);
}

TEST_CASE("sustained current settles at the steady impurity", "[plant]") {
  ElectrolyzerParams p;
  // Low current: the crossover fraction is large; the chosen calibration puts
  // 10% of rated current right at the impurity ceiling.
  double i_rated = plant::max_current(p, 60.0);
  CHECK(plant::steady_hto(p, 0.1 * i_rated) ==
        Catch::Approx(0.019999982934948052).epsilon(1e-13));
  CHECK(plant::steady_hto(p, i_rated) ==
        Catch::Approx(0.009219855061494807).epsilon(1e-13));

  for (bool absolute : {false, true}) {
    ElectrolyzerParams q = p;
    q.absolute_temperature_in_hto = absolute;
    ElectrolyzerState s;
    s.t_ele = 25.0;
    double i = 10.0;
    double dt = 5.0;
    for (int k = 0; k < 40000; ++k) s = plant::step(q, s, i, 25.0, dt).state;
    // The long-run impurity is temperature-convention independent.
    REQUIRE(plant::hto(q, s) == Catch::Approx(plant::steady_hto(q, i)).epsilon(1e-8));
  }

  CHECK_THROWS_AS(plant::steady_hto(p, 0.0), std::invalid_argument);
}

TEST_CASE("temperature convention only rescales the impurity reading", "[plant]") {
  ElectrolyzerParams celsius;
  ElectrolyzerParams absolute;
  absolute.absolute_temperature_in_hto = true;
  ElectrolyzerState s;
  s.t_ele = 47.0;
  s.n_sep_g = 8e-3;
  double ratio = plant::hto(absolute, s) / plant::hto(celsius, s);
  CHECK(ratio == Catch::Approx((47.0 + 273.15) / 47.0).epsilon(1e-13));
}

TEST_CASE("cluster rating sums unit capabilities at the reference point", "[plant]") {
  std::vector<ElectrolyzerParams> cluster(4);
  CHECK(plant::cluster_rated_power(cluster) ==
        Catch::Approx(4.0 * 2300.5760869565215).epsilon(1e-13));
}
