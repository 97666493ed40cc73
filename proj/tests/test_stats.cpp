#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "majdyn/stats.hpp"

using namespace majdyn;

TEST_CASE("ks_statistic examples") {
  const int t = 1000;
  const boost::math::normal_distribution<double> nd;
  std::vector<double> q;
  for (int i = 1; i <= t; ++i) q.push_back(boost::math::quantile(nd, (i - 0.5) / t));
  // Midpoint quantiles sit exactly 1/(2t) from the step function.
  CHECK(ks_statistic(q) == doctest::Approx(0.5 / t).epsilon(1e-9));
  CHECK(ks_statistic(std::vector<double>{0.0}) == doctest::Approx(0.5));
  CHECK(ks_statistic(std::vector<double>(50, 10.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("ks_statistic does not depend on input order") {
  std::vector<double> a{0.3, -1.2, 2.0, 0.1, -0.4, 0.9};
  std::vector<double> b{2.0, 0.9, 0.3, 0.1, -0.4, -1.2};
  CHECK(ks_statistic(a) == ks_statistic(b));
}

TEST_CASE("summarize") {
  const auto s = summarize(std::vector<double>{1, 2, 3, 4});
  CHECK(s.count == 4);
  CHECK(s.mean == doctest::Approx(2.5));
  REQUIRE(s.variance.has_value());
  CHECK(*s.variance == doctest::Approx(5.0 / 3));
  CHECK(s.min == 1);
  CHECK(s.max == 4);
  REQUIRE(s.ci95_mean.has_value());
  CHECK(*s.ci95_mean == doctest::Approx(1.96 * std::sqrt(5.0 / 3 / 4)));

  const auto one = summarize(std::vector<double>{7});
  CHECK_FALSE(one.variance.has_value());
  CHECK_FALSE(one.ci95_mean.has_value());
  CHECK(one.to_json().at("variance").is_null());

  // Large offset: two-pass variance stays exact.
  std::vector<double> big;
  for (int i = 0; i < 1000; ++i) big.push_back(1e9 + (i % 2));
  CHECK(*summarize(big).variance == doctest::Approx(0.25 * 1000 / 999).epsilon(1e-12));
  CHECK(summarize(big).min <= summarize(big).mean);
  CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("proportion_ci95") {
  CHECK(proportion_ci95(0.5, 100) == doctest::Approx(1.96 * 0.05));
  CHECK(proportion_ci95(0.0, 100) == 0.0);
  CHECK(proportion_ci95(0.3, 400) == doctest::Approx(proportion_ci95(0.3, 100) / 2));
}
