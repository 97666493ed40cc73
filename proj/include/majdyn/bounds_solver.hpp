#pragma once

#include <optional>

#include "json.hpp"

namespace majdyn {

/// Supremum-condition query: eps in (0, 1/4), delta in (eps, 1 - eps).
struct PropositionQuery {
  double eps = 1e-10;
  double delta = 0.499;
  std::optional<double> alpha;

  void validate() const;
};

struct SupResult {
  double sup_value = 0.0;
  double gamma_argmax = 0.0;
  double grid_resolution = 0.0;
  bool refined = false;

  nlohmann::json to_json() const;
};

inline constexpr double kGammaMax = 2.0;
inline constexpr int kGammaGridIntervals = 20'000;
inline constexpr double kGammaTolerance = 1e-8;
inline constexpr double kAlphaTolerance = 1e-6;
inline constexpr double kAlphaCeiling = 10.0;

/// exp(-gamma^2/2) * Phi((gamma - 2 alpha) / sqrt(1 - delta))^delta
double objective(double gamma, double alpha, double delta);

/// Grid scan over [0, 2] (lowest-gamma tie-break) followed by ternary
/// refinement on the bracketing cells.
SupResult sup_over_gamma(double alpha, double delta);

/// sup_over_gamma(alpha, delta) <= 1/4 - eps. Requires query.alpha.
bool feasibility_check(const PropositionQuery& query);

/// Smallest alpha in [0, 10] that passes feasibility_check, to kAlphaTolerance.
/// Throws std::domain_error if alpha = 10 is still infeasible.
double min_alpha(double delta, double eps);

}  // namespace majdyn
