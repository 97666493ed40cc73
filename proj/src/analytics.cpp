#include "majdyn/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "majdyn/numerics.hpp"

namespace majdyn {

double ModelParams::sigma() const noexcept {
  return std::sqrt(static_cast<double>(n()) * p * (1.0 - p));
}

void ModelParams::validate() const {
  if (r0 < 0 || b0 < 0) throw std::invalid_argument("class sizes must be non-negative");
  if (n() < 2) throw std::invalid_argument("need at least two vertices");
  require_probability(p, "p");
}

double mu(const ModelParams& params) {
  params.validate();
  const DiffDistribution w = diff_distribution(params.r0, params.b0, params.p);
  return w.survival(0) * w.cdf(0);
}

double mu_v(const ModelParams& params, Color color) {
  params.validate();
  const std::int64_t own = color == Color::Red ? params.r0 : params.b0;
  const std::int64_t other = color == Color::Red ? params.b0 : params.r0;
  if (own < 1) throw std::invalid_argument("mu_v needs a non-empty colour class");
  // Ties keep the colour, so v stays iff Bin(own-1) >= Bin(other).
  const DiffDistribution w = diff_distribution(own - 1, other, params.p);
  return 2.0 * w.survival(0) - 1.0;
}

VariancePrediction variance_prediction(const ModelParams& params) {
  const double n = static_cast<double>(params.n());
  return {n * mu(params), static_cast<double>(params.delta()) + n / params.sigma()};
}

double mean_lower_bound(const ModelParams& params) {
  params.validate();
  if (params.r0 < params.b0) throw std::invalid_argument("mean_lower_bound requires r0 >= b0");
  const double n = static_cast<double>(params.n());
  const double sigma = params.sigma();
  const double lead = static_cast<double>(params.r0 - params.b0);
  return n * std_normal_cdf(lead * params.p / sigma) - kBerryEsseenSlack * n / sigma;
}

TailBound tail_bound(const ModelParams& params, double t, double c) {
  params.validate();
  if (!(t >= 1.0)) throw std::invalid_argument("tail_bound requires t >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("tail_bound constant must be positive");
  const double n = static_cast<double>(params.n());
  const double sigma = params.sigma();
  const double lead = static_cast<double>(params.r0 - params.b0);
  TailBound out;
  out.threshold = n * std_normal_cdf(lead * params.p / sigma) - n * t / sigma;
  if (std::isinf(t)) {
    out.prob_lb = 1.0;
  } else {
    out.prob_lb = std::clamp(1.0 - c * params.p * (1.0 - params.p) / (t * t), 0.0, 1.0);
  }
  return out;
}

LeadThreshold lead_threshold(const ModelParams& params) {
  params.validate();
  const double n = static_cast<double>(params.n());
  const double delta = static_cast<double>(params.delta());
  const double scale = delta * std::sqrt(n * params.p / (1.0 - params.p));
  LeadThreshold out;
  out.value = n / 2.0 + std::min(0.3 * n, kLeadCoefficientStatement * scale);
  out.conservative_value = n / 2.0 + std::min(0.3 * n, kLeadCoefficientProof * scale);
  out.hypotheses_met = delta * params.p >= 5.0 && params.sigma() >= 25.0;
  return out;
}

double fixation_advantage_bound(std::int64_t delta) {
  if (delta < 0) throw std::invalid_argument("lead must be non-negative");
  const double arg =
      2.0 * (static_cast<double>(delta) / std::sqrt(2.0 * std::numbers::pi) - kFixationAlpha);
  return 2.0 * std_normal_cdf(arg) - 1.0;
}

std::vector<double> clt_standardize(std::span<const double> samples, const ModelParams& params,
                                    double empirical_mean) {
  if (samples.empty()) throw std::invalid_argument("clt_standardize needs samples");
  const double var = variance_prediction(params).var_pred;
  if (!(var > 0.0)) throw std::invalid_argument("predicted variance must be positive");
  const double scale = std::sqrt(var);
  std::vector<double> z;
  z.reserve(samples.size());
  for (double s : samples) z.push_back((s - empirical_mean) / scale);
  return z;
}

Predictions predict(const ModelParams& params) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Predictions out;
  out.mu = mu(params);
  out.mu_r = params.r0 > 0 ? mu_v(params, Color::Red) : nan;
  out.mu_b = params.b0 > 0 ? mu_v(params, Color::Blue) : nan;
  out.sigma = params.sigma();
  out.delta = params.delta();
  const VariancePrediction v = variance_prediction(params);
  out.var_pred = v.var_pred;
  out.var_error_scale = v.error_scale;
  out.mean_lb = params.r0 >= params.b0 ? mean_lower_bound(params) : nan;
  return out;
}

namespace {
nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json Predictions::to_json() const {
  return nlohmann::json{{"mu", mu},
                        {"mu_r", finite_or_null(mu_r)},
                        {"mu_b", finite_or_null(mu_b)},
                        {"sigma", sigma},
                        {"delta", delta},
                        {"var_pred", var_pred},
                        {"var_error_scale", var_error_scale},
                        {"mean_lb", finite_or_null(mean_lb)}};
}

}  // namespace majdyn
