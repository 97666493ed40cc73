#include <cmath>
#include <random>

#include "doctest.h"
#include "majdyn/bounds_solver.hpp"
#include "majdyn/numerics.hpp"

using namespace majdyn;

namespace {

// Plain dense-grid maximum, independent of the solver's refinement.
double grid_sup(double alpha, double delta, int points) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double g = 2.0 * i / points;
    const double v = std::exp(-g * g / 2) *
                     std::pow(std_normal_cdf((g - 2 * alpha) / std::sqrt(1 - delta)), delta);
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("objective examples") {
  CHECK(objective(0.0, 0.0, 0.3) == doctest::Approx(std::pow(2.0, -0.3)).epsilon(1e-14));
  const double a = std::exp(-2.0) * std::pow(std_normal_cdf(0.3 / std::sqrt(0.501)), 0.499);
  CHECK(objective(2.0, 0.85, 0.499) == doctest::Approx(a).epsilon(1e-14));
  CHECK(objective(2.0, 0.85, 0.499) == doctest::Approx(0.110).epsilon(0.01));
  CHECK(objective(0.0, 0.85, 0.499) == doctest::Approx(0.091).epsilon(0.01));
  CHECK_THROWS_AS(objective(2.5, 0.85, 0.499), std::invalid_argument);
  CHECK_THROWS_AS(objective(-0.1, 0.85, 0.499), std::invalid_argument);
  CHECK_THROWS_AS(objective(1.0, 0.85, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(objective(1.0, 0.85, 0.0), std::invalid_argument);
}

TEST_CASE("objective range and monotonicity in alpha") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> g(0.0, 2.0);
  std::uniform_real_distribution<double> a(0.0, 5.0);
  std::uniform_real_distribution<double> d(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double gamma = g(rng);
    const double alpha = a(rng);
    const double delta = d(rng);
    const double v = objective(gamma, alpha, delta);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v <= std::exp(-gamma * gamma / 2) + 1e-15);
    CHECK(objective(gamma, alpha + 0.1, delta) <= v);
  }
}

TEST_CASE("sup_over_gamma examples") {
  const auto big = sup_over_gamma(10.0, 0.499);
  CHECK(big.sup_value < 1e-6);

  const auto zero = sup_over_gamma(0.0, 0.5);
  CHECK(zero.sup_value >= grid_sup(0.0, 0.5, 200000) - 1e-12);
  CHECK(zero.sup_value == doctest::Approx(grid_sup(0.0, 0.5, 200000)).epsilon(1e-9));
  CHECK(zero.sup_value >= std::pow(2.0, -0.5) - 1e-12);

  const auto chosen = sup_over_gamma(0.85, 0.499);
  CHECK(chosen.sup_value < 0.25);
  CHECK(chosen.gamma_argmax >= 0.0);
  CHECK(chosen.gamma_argmax <= 2.0);
  CHECK(chosen.grid_resolution == doctest::Approx(1e-4));
  CHECK(std::fabs(chosen.sup_value - grid_sup(0.85, 0.499, 400000)) <= 1e-9);
}

TEST_CASE("sup_over_gamma is nonincreasing in alpha") {
  for (double delta : {0.1, 0.3, 0.499, 0.8}) {
    double prev = 2.0;
    for (int i = 0; i <= 40; ++i) {
      const double s = sup_over_gamma(0.1 * i, delta).sup_value;
      CHECK(s <= prev + 1e-15);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      prev = s;
    }
  }
}

TEST_CASE("feasibility_check examples") {
  CHECK(feasibility_check({1e-10, 0.499, 0.85}));
  CHECK_FALSE(feasibility_check({1e-10, 0.499, 0.0}));
  CHECK(feasibility_check({0.2499, 0.4, 100.0}));
  CHECK_THROWS_AS(feasibility_check({1e-10, 0.499, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(feasibility_check({0.3, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(feasibility_check({0.1, 0.05, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(feasibility_check({0.1, 0.95, 1.0}), std::invalid_argument);
}

TEST_CASE("min_alpha contract") {
  const double a = min_alpha(0.499, 1e-10);
  CHECK(a >= 0.0);
  CHECK(a <= 0.85);
  CHECK(feasibility_check({1e-10, 0.499, a}));
  CHECK_FALSE(feasibility_check({1e-10, 0.499, a - 1e-3}));
  CHECK_FALSE(feasibility_check({1e-10, 0.499, a - 10 * kAlphaTolerance}));

  double prev = 0.0;
  for (double eps : {0.05, 0.1, 0.15, 0.2, 0.24}) {
    const double v = min_alpha(0.3, eps);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("SupResult JSON") {
  const auto j = sup_over_gamma(0.85, 0.499).to_json();
  CHECK(j.contains("sup_value"));
  CHECK(j.contains("gamma_argmax"));
  CHECK(j.contains("grid_resolution"));
  CHECK(j.at("refined").is_boolean());
}
