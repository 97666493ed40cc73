#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace majdyn {

enum class Color : std::uint8_t { Red, Blue };

/// Initial class sizes and edge probability of a one-step prediction.
struct ModelParams {
  std::int64_t r0 = 0;
  std::int64_t b0 = 0;
  double p = 0.5;

  std::int64_t n() const noexcept { return r0 + b0; }
  std::int64_t delta() const noexcept { return r0 >= b0 ? r0 - b0 : b0 - r0; }
  /// sqrt(n p (1-p))
  double sigma() const noexcept;
  void validate() const;
};

// Statement and proof coefficients of the lead threshold bound; they disagree.
inline constexpr double kLeadCoefficientStatement = 0.11;
inline constexpr double kLeadCoefficientProof = 0.02;
// Berry-Esseen constant 0.4748 rounded up.
inline constexpr double kBerryEsseenSlack = 0.475;
inline constexpr double kFixationAlpha = 0.85;
inline constexpr double kDefaultTailConstant = 4.0;

/// P(W >= 0) * P(W <= 0) for W = Bin(r0,p) - Bin(b0,p).
double mu(const ModelParams& params);

/// 2 P(v keeps its colour after one step) - 1 for a vertex of the given class.
double mu_v(const ModelParams& params, Color color);

struct VariancePrediction {
  double var_pred = 0.0;     // n * mu
  double error_scale = 0.0;  // Delta + n / sigma
};
VariancePrediction variance_prediction(const ModelParams& params);

/// n Phi(Delta p / sigma) - 0.475 n / sigma; requires r0 >= b0.
double mean_lower_bound(const ModelParams& params);

struct TailBound {
  double threshold = 0.0;
  double prob_lb = 0.0;
};
/// Chebyshev tail bound for |R_1|. The universal constant is caller-supplied.
/// The lead is taken signed (r0 - b0).
TailBound tail_bound(const ModelParams& params, double t, double c = kDefaultTailConstant);

struct LeadThreshold {
  double value = 0.0;               // coefficient 0.11
  double conservative_value = 0.0;  // coefficient 0.02
  bool hypotheses_met = false;      // Delta p >= 5 and sigma >= 25
};
LeadThreshold lead_threshold(const ModelParams& params);

/// 2 Phi(2 (Delta / sqrt(2 pi) - 0.85)) - 1, without the vanishing correction.
double fixation_advantage_bound(std::int64_t delta);

/// (sample - empirical_mean) / sqrt(n mu).
std::vector<double> clt_standardize(std::span<const double> samples, const ModelParams& params,
                                    double empirical_mean);

struct Predictions {
  double mu = 0.0;
  double mu_r = 0.0;  // NaN when r0 == 0
  double mu_b = 0.0;  // NaN when b0 == 0
  double sigma = 0.0;
  std::int64_t delta = 0;
  double var_pred = 0.0;
  double var_error_scale = 0.0;
  double mean_lb = 0.0;  // NaN when r0 < b0

  nlohmann::json to_json() const;
};
Predictions predict(const ModelParams& params);

}  // namespace majdyn
