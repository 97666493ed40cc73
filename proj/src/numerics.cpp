#include "majdyn/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "majdyn/summation.hpp"

namespace majdyn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(n!) - log(sqrt(2 pi n) (n/e)^n).  Small n come from a long double
// lgamma table; larger n use the asymptotic series (Loader 2000).
double stirling_error(std::int64_t n) {
  static const std::array<double, 16> table = [] {
    std::array<double, 16> t{};
    const long double half_log_2pi = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
    for (int i = 1; i < 16; ++i) {
      const long double x = i;
      t[i] = static_cast<double>(std::lgamma(x + 1.0L) - (x + 0.5L) * std::log(x) + x -
                                 half_log_2pi);
    }
    return t;
  }();
  if (n < 16) return table[static_cast<std::size_t>(n)];

  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double x = static_cast<double>(n);
  const double xx = x * x;
  if (n > 500) return (s0 - s1 / xx) / x;
  if (n > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// x log(x/np) + np - x, stable when x is close to np.
double deviance_term(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace

ConvolutionCapExceeded::ConvolutionCapExceeded(std::int64_t total)
    : std::length_error("binomial difference with n+m=" + std::to_string(total) +
                        " exceeds the exact convolution cap of " +
                        std::to_string(kConvolutionCap) + "; use normal approximation") {}

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0,1), got " +
                                std::to_string(p));
  }
}

double log_binomial_pmf(std::int64_t n, double p, std::int64_t k) {
  require_probability(p, "p");
  if (n < 0) throw std::invalid_argument("binomial trial count must be non-negative");
  if (k < 0 || k > n) return kNegInf;
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  if (k == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -deviance_term(nd, nd * q) - nd * p : nd * std::log(q);
  }
  if (k == n) {
    return q < 0.1 ? -deviance_term(nd, nd * p) - nd * q : nd * std::log(p);
  }
  const double kd = static_cast<double>(k);
  const double lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k) -
                    deviance_term(kd, nd * p) - deviance_term(nd - kd, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / nd);
  return lc - 0.5 * lf;
}

namespace {

struct BinomialWindow {
  std::int64_t first = 0;  // smallest k with nonzero mass
  std::vector<double> mass;
};

BinomialWindow binomial_window(std::int64_t n, double p) {
  std::vector<double> full(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = 0; k <= n; ++k) {
    full[static_cast<std::size_t>(k)] = std::exp(log_binomial_pmf(n, p, k));
  }
  const auto nonzero = [](double x) { return x != 0.0; };
  const auto lo = std::find_if(full.begin(), full.end(), nonzero);
  const auto hi = std::find_if(full.rbegin(), full.rend(), nonzero).base();
  BinomialWindow w;
  w.first = lo - full.begin();
  w.mass.assign(lo, hi);
  return w;
}

}  // namespace

DiffDistribution::DiffDistribution(std::int64_t n, std::int64_t m, double p,
                                   std::vector<double> pmf)
    : n_(n), m_(m), p_(p), pmf_(std::move(pmf)) {
  if (n < 0 || m < 0) throw std::invalid_argument("binomial counts must be non-negative");
  require_probability(p, "p");
  if (pmf_.size() != static_cast<std::size_t>(n + m + 1)) {
    throw std::invalid_argument("pmf length must equal n + m + 1");
  }
}

double DiffDistribution::pmf(std::int64_t t) const noexcept {
  if (t < -m_ || t > n_) return 0.0;
  return pmf_[static_cast<std::size_t>(t + m_)];
}

double DiffDistribution::cdf(std::int64_t t) const noexcept {
  if (t < -m_) return 0.0;
  const std::int64_t last = std::min(t, n_) + m_;
  CompensatedSum s;
  for (std::int64_t i = 0; i <= last; ++i) s += pmf_[static_cast<std::size_t>(i)];
  return std::min(1.0, s.value());
}

double DiffDistribution::survival(std::int64_t t) const noexcept {
  if (t > n_) return 0.0;
  const std::int64_t first = std::max(t, -m_) + m_;
  CompensatedSum s;
  for (auto i = static_cast<std::size_t>(first); i < pmf_.size(); ++i) s += pmf_[i];
  return std::min(1.0, s.value());
}

double DiffDistribution::total_mass() const noexcept {
  CompensatedSum s;
  for (double x : pmf_) s += x;
  return s.value();
}

double DiffDistribution::mean() const noexcept {
  CompensatedSum s;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    s += (static_cast<double>(i) - static_cast<double>(m_)) * pmf_[i];
  }
  return s.value();
}

double DiffDistribution::variance() const noexcept {
  const double mu = mean();
  CompensatedSum s;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(m_) - mu;
    s += d * d * pmf_[i];
  }
  return s.value();
}

nlohmann::json DiffDistribution::to_json() const {
  return nlohmann::json{{"n", n_}, {"m", m_}, {"p", p_}, {"support_min", -m_}, {"pmf", pmf_}};
}

DiffDistribution DiffDistribution::from_json(const nlohmann::json& j) {
  return DiffDistribution(j.at("n").get<std::int64_t>(), j.at("m").get<std::int64_t>(),
                          j.at("p").get<double>(), j.at("pmf").get<std::vector<double>>());
}

DiffDistribution diff_distribution(std::int64_t n, std::int64_t m, double p) {
  require_probability(p, "p");
  if (n < 0 || m < 0) throw std::invalid_argument("binomial counts must be non-negative");
  if (n + m > kConvolutionCap) throw ConvolutionCapExceeded(n + m);

  std::vector<double> pmf(static_cast<std::size_t>(n + m + 1), 0.0);
  const BinomialWindow pos = binomial_window(n, p);
  const BinomialWindow neg = binomial_window(m, p);

  // Outer loop over the smaller binomial; index of W = x - y is x - y + m.
  // Both orientations accumulate the same products in the same order, so
  // reflection symmetry holds bit-for-bit.
  if (m <= n) {
    for (std::size_t j = 0; j < neg.mass.size(); ++j) {
      const double py = neg.mass[j];
      const std::int64_t y = neg.first + static_cast<std::int64_t>(j);
      double* out = pmf.data() + (pos.first - y + m);
      for (std::size_t i = 0; i < pos.mass.size(); ++i) out[i] += pos.mass[i] * py;
    }
  } else {
    for (std::size_t i = 0; i < pos.mass.size(); ++i) {
      const double px = pos.mass[i];
      const std::int64_t x = pos.first + static_cast<std::int64_t>(i);
      // y runs upward, so W = x - y runs downward through pmf.
      double* out = pmf.data() + (x - neg.first + m);
      for (std::size_t j = 0; j < neg.mass.size(); ++j) {
        *(out - static_cast<std::ptrdiff_t>(j)) += px * neg.mass[j];
      }
    }
  }
  return DiffDistribution(n, m, p, std::move(pmf));
}

double diff_cdf(const DiffDistribution& dist, std::int64_t t) { return dist.cdf(t); }

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

nlohmann::json AnticoncentrationReport::to_json() const {
  return nlohmann::json{{"sup_pmf", sup_pmf},
                        {"max_adjacent_diff", max_adjacent_diff},
                        {"implied_c1", implied_c1},
                        {"implied_c2", implied_c2}};
}

AnticoncentrationReport anticoncentration_report(const DiffDistribution& dist) {
  AnticoncentrationReport r;
  double prev = 0.0;  // P(W = support_min - 1)
  for (double x : dist.pmf_values()) {
    r.sup_pmf = std::max(r.sup_pmf, x);
    r.max_adjacent_diff = std::max(r.max_adjacent_diff, std::fabs(x - prev));
    prev = x;
  }
  r.max_adjacent_diff = std::max(r.max_adjacent_diff, prev);  // step off the top
  const double scale =
      static_cast<double>(dist.n() + dist.m()) * dist.p() * (1.0 - dist.p());
  r.implied_c1 = r.sup_pmf * std::sqrt(scale);
  r.implied_c2 = r.max_adjacent_diff * scale;
  return r;
}

AnticoncentrationReport anticoncentration_report(std::int64_t n, std::int64_t m, double p) {
  return anticoncentration_report(diff_distribution(n, m, p));
}

}  // namespace majdyn
