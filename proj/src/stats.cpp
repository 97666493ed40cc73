#include "majdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "majdyn/numerics.hpp"
#include "majdyn/summation.hpp"

namespace majdyn {

SummaryStats summarize(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("summary of an empty sample");
  SummaryStats s;
  s.count = samples.size();
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min = *lo;
  s.max = *hi;
  CompensatedSum total;
  for (double x : samples) total += x;
  s.mean = std::clamp(total.value() / static_cast<double>(s.count), s.min, s.max);
  if (s.count >= 2) {
    CompensatedSum sq;
    for (double x : samples) sq += (x - s.mean) * (x - s.mean);
    s.variance = sq.value() / static_cast<double>(s.count - 1);
    s.ci95_mean = 1.96 * std::sqrt(*s.variance / static_cast<double>(s.count));
  }
  return s;
}

double ks_statistic(std::span<const double> z_scores) {
  if (z_scores.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::vector<double> sorted(z_scores.begin(), z_scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = std_normal_cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / count - f;
    const double below = f - static_cast<double>(i) / count;
    d = std::max({d, above, below});
  }
  return d;
}

double proportion_ci95(double proportion, std::uint64_t count) {
  if (count == 0) return 0.0;
  return 1.96 * std::sqrt(proportion * (1.0 - proportion) / static_cast<double>(count));
}

nlohmann::json SummaryStats::to_json() const {
  nlohmann::json j{{"count", count}, {"mean", mean}, {"min", min}, {"max", max}};
  j["variance"] = variance ? nlohmann::json(*variance) : nlohmann::json(nullptr);
  j["ci95_mean"] = ci95_mean ? nlohmann::json(*ci95_mean) : nlohmann::json(nullptr);
  if (ks_statistic) j["ks_statistic"] = *ks_statistic;
  return j;
}

}  // namespace majdyn
