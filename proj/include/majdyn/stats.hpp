#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "json.hpp"

namespace majdyn {

struct SummaryStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  std::optional<double> variance;  // unbiased; absent when count < 2
  double min = 0.0;
  double max = 0.0;
  std::optional<double> ks_statistic;
  std::optional<double> ci95_mean;  // 1.96 sd / sqrt(count)

  nlohmann::json to_json() const;
};

/// Two-pass mean and unbiased variance with compensated sums.
SummaryStats summarize(std::span<const double> samples);

/// sup_x |F_emp(x) - Phi(x)|, evaluated at the order statistics.
double ks_statistic(std::span<const double> z_scores);

/// 95 % normal-approximation radius for a proportion estimated from `count` trials.
double proportion_ci95(double proportion, std::uint64_t count);

}  // namespace majdyn
