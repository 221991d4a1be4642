#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "elycoord/cubic_roots.hpp"

using elycoord::RealRoots;
using elycoord::solve_cubic;
using elycoord::solve_linear;
using elycoord::solve_quadratic;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double eval(double a3, double a2, double a1, double a0, double x) {
  return ((a3 * x + a2) * x + a1) * x + a0;
}

std::vector<double> as_vector(const RealRoots& r) {
  return {r.values.begin(), r.values.begin() + r.count};
}

}  // namespace

TEST_CASE("linear and degenerate inputs", "[cubic]") {
  CHECK(as_vector(solve_linear(3.0, 6.0)) == std::vector<double>{-2.0});
  CHECK(solve_linear(0.0, 0.0).count == 0);
  CHECK(solve_linear(0.0, 5.0).count == 0);
  // Leading zeros dispatch downward.
  CHECK(as_vector(solve_cubic(0.0, 0.0, 2.0, -8.0)) == std::vector<double>{4.0});
}

TEST_CASE("quadratic roots", "[cubic]") {
  auto r = solve_quadratic(2.0, 0.0, -8.0);
  REQUIRE(r.count == 2);
  CHECK(r.values[0] == Catch::Approx(-2.0).margin(1e-14));
  CHECK(r.values[1] == Catch::Approx(2.0).margin(1e-14));

  auto dbl = solve_quadratic(1.0, -2.0, 1.0);
  REQUIRE(dbl.count == 1);
  CHECK(dbl.values[0] == Catch::Approx(1.0).margin(1e-14));

  CHECK(solve_quadratic(1.0, 0.0, 1.0).count == 0);

  // Cancellation-prone: x^2 - 1e8 x + 1 has roots ~1e8 and ~1e-8.
  auto hard = solve_quadratic(1.0, -1e8, 1.0);
  REQUIRE(hard.count == 2);
  CHECK(hard.values[0] == Catch::Approx(1e-8).epsilon(1e-12));
  CHECK(hard.values[1] == Catch::Approx(1e8).epsilon(1e-12));
}

TEST_CASE("cubic with three known roots", "[cubic]") {
  // (x-1)(x-2)(x-3)
  auto r = solve_cubic(1.0, -6.0, 11.0, -6.0);
  REQUIRE(r.count == 3);
  CHECK(r.values[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.values[1] == Catch::Approx(2.0).margin(1e-12));
  CHECK(r.values[2] == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("multiple roots are reported once", "[cubic]") {
  // (x-2)^3
  auto triple = solve_cubic(1.0, -6.0, 12.0, -8.0);
  REQUIRE(triple.count == 1);
  CHECK(triple.values[0] == Catch::Approx(2.0).margin(1e-7));

  // (x-1)^2 (x-3)
  auto dbl = solve_cubic(1.0, -5.0, 7.0, -3.0);
  REQUIRE(dbl.count == 2);
  CHECK(dbl.values[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(dbl.values[1] == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("single real root", "[cubic]") {
  // x^3 + x + 1; the real root of this depressed cubic.
  auto r = solve_cubic(1.0, 0.0, 1.0, 1.0);
  REQUIRE(r.count == 1);
  CHECK(r.values[0] == Catch::Approx(-0.6823278038280193).epsilon(1e-13));
}

TEST_CASE("roots reconstructed from random factorizations", "[cubic]") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    // Distinct, well-separated roots so conditioning stays sane.
    std::array<double, 3> roots{};
    roots[0] = uniform(rng, -50.0, 50.0);
    roots[1] = roots[0] + uniform(rng, 0.5, 40.0);
    roots[2] = roots[1] + uniform(rng, 0.5, 40.0);
    double a3 = uniform(rng, 0.1, 5.0) * (rng() % 2 ? 1.0 : -1.0);

    double s1 = roots[0] + roots[1] + roots[2];
    double s2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
    double s3 = roots[0] * roots[1] * roots[2];
    auto r = solve_cubic(a3, -a3 * s1, a3 * s2, -a3 * s3);

    REQUIRE(r.count == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(r.values[i] - roots[i]) <=
            1e-8 * std::max(1.0, std::abs(roots[i])));
    }
  }
}

TEST_CASE("one real plus complex pair", "[cubic]") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 500; ++trial) {
    double real_root = uniform(rng, -30.0, 30.0);
    // (x - r)(x^2 + bx + c) with negative discriminant.
    double b = uniform(rng, -10.0, 10.0);
    double c = b * b / 4.0 + uniform(rng, 0.5, 30.0);
    auto r = solve_cubic(1.0, b - real_root, c - real_root * b, -real_root * c);
    REQUIRE(r.count == 1);
    CHECK(std::abs(r.values[0] - real_root) <=
          1e-8 * std::max(1.0, std::abs(real_root)));
  }
}

TEST_CASE("random coefficients against a sign-scan oracle", "[cubic]") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 1000; ++trial) {
    double a3 = uniform(rng, 0.1, 10.0) * (rng() % 2 ? 1.0 : -1.0);
    double a2 = uniform(rng, -10.0, 10.0);
    double a1 = uniform(rng, -10.0, 10.0);
    double a0 = uniform(rng, -10.0, 10.0);

    auto r = solve_cubic(a3, a2, a1, a0);

    // Ascending and distinct.
    for (int i = 1; i < r.count; ++i) {
      CHECK(r.values[i] > r.values[i - 1]);
    }
    // Residuals small relative to the evaluation scale.
    double coef = std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
    for (int i = 0; i < r.count; ++i) {
      double x = r.values[i];
      double fscale = coef * std::max(1.0, std::abs(x) * std::abs(x) * std::abs(x));
      CHECK(std::abs(eval(a3, a2, a1, a0, x)) <= 1e-9 * fscale);
    }

    // Every strict sign change over a dense grid must be matched by a root
    // inside that grid cell.
    double bound = 1.0 + std::max({std::abs(a2 / a3), std::abs(a1 / a3),
                                   std::abs(a0 / a3)});
    const int kSteps = 4000;
    double prev_x = -bound;
    double prev_f = eval(a3, a2, a1, a0, prev_x);
    for (int s = 1; s <= kSteps; ++s) {
      double x = -bound + 2.0 * bound * s / kSteps;
      double f = eval(a3, a2, a1, a0, x);
      if (prev_f * f < 0.0) {
        bool found = false;
        for (int i = 0; i < r.count; ++i) {
          if (r.values[i] >= prev_x - 1e-9 && r.values[i] <= x + 1e-9) found = true;
        }
        CHECK(found);
      }
      prev_x = x;
      prev_f = f;
    }
  }
}

TEST_CASE("tiny leading coefficient stays finite", "[cubic]") {
  // Nearly-quadratic cubics must not blow up: compare against the quadratic
  // limit's roots.
  auto r = solve_cubic(1e-30, 1.0, -3.0, 2.0);
  REQUIRE(r.count >= 2);
  bool near1 = false;
  bool near2 = false;
  for (int i = 0; i < r.count; ++i) {
    if (std::abs(r.values[i] - 1.0) < 1e-6) near1 = true;
    if (std::abs(r.values[i] - 2.0) < 1e-6) near2 = true;
    CHECK(std::isfinite(r.values[i]));
  }
  CHECK(near1);
  CHECK(near2);
}
