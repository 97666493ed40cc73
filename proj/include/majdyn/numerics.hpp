#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace majdyn {

/// Largest n + m for which an exact binomial-difference pmf is built.
inline constexpr std::int64_t kConvolutionCap = 200'000;

/// Thrown when an exact pmf would exceed kConvolutionCap; callers should fall
/// back to std_normal_cdf based approximations.
class ConvolutionCapExceeded : public std::length_error {
 public:
  explicit ConvolutionCapExceeded(std::int64_t total);
};

/// log P(Bin(n, p) = k); -inf outside [0, n].
double log_binomial_pmf(std::int64_t n, double p, std::int64_t k);

/// Exact pmf of W = Bin(n, p) - Bin(m, p) on its support [-m, n].
class DiffDistribution {
 public:
  DiffDistribution(std::int64_t n, std::int64_t m, double p, std::vector<double> pmf);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t m() const noexcept { return m_; }
  double p() const noexcept { return p_; }
  std::int64_t support_min() const noexcept { return -m_; }
  std::int64_t support_max() const noexcept { return n_; }

  /// P(W = t), zero off the support.
  double pmf(std::int64_t t) const noexcept;
  std::span<const double> pmf_values() const noexcept { return pmf_; }

  /// P(W <= t), clamped outside the support.
  double cdf(std::int64_t t) const noexcept;
  /// P(W >= t), summed directly so that upper tails keep relative accuracy.
  double survival(std::int64_t t) const noexcept;

  double total_mass() const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;

  nlohmann::json to_json() const;
  static DiffDistribution from_json(const nlohmann::json& j);

 private:
  std::int64_t n_;
  std::int64_t m_;
  double p_;
  std::vector<double> pmf_;
};

/// Exact convolution. n + m == 0 yields the point mass at 0.
DiffDistribution diff_distribution(std::int64_t n, std::int64_t m, double p);

double diff_cdf(const DiffDistribution& dist, std::int64_t t);

/// Standard normal CDF.
double std_normal_cdf(double t);

struct AnticoncentrationReport {
  double sup_pmf = 0.0;
  double max_adjacent_diff = 0.0;
  double implied_c1 = 0.0;
  double implied_c2 = 0.0;

  nlohmann::json to_json() const;
};

/// Scans the full support of Bin(n,p) - Bin(m,p), edges included, and reports
/// the constants implied by sup_t P(W=t) <= C/sqrt(V) and
/// sup_t |P(W=t+1)-P(W=t)| <= C/V with V = (m+n)p(1-p).
AnticoncentrationReport anticoncentration_report(std::int64_t n, std::int64_t m, double p);
AnticoncentrationReport anticoncentration_report(const DiffDistribution& dist);

void require_probability(double p, const char* what);

}  // namespace majdyn
