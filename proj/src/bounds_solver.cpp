#include "majdyn/bounds_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "majdyn/numerics.hpp"

namespace majdyn {

void PropositionQuery::validate() const {
  if (!(eps > 0.0 && eps < 0.25)) throw std::invalid_argument("eps must lie in (0, 1/4)");
  if (!(delta > eps && delta < 1.0 - eps)) {
    throw std::invalid_argument("delta must lie in (eps, 1 - eps)");
  }
  if (alpha && !(*alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
}

nlohmann::json SupResult::to_json() const {
  return nlohmann::json{{"sup_value", sup_value},
                        {"gamma_argmax", gamma_argmax},
                        {"grid_resolution", grid_resolution},
                        {"refined", refined}};
}

double objective(double gamma, double alpha, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  if (!(gamma >= 0.0 && gamma <= kGammaMax)) {
    throw std::invalid_argument("gamma must lie in [0, 2]");
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  const double phi = std_normal_cdf((gamma - 2.0 * alpha) / std::sqrt(1.0 - delta));
  return std::exp(-0.5 * gamma * gamma) * std::pow(phi, delta);
}

SupResult sup_over_gamma(double alpha, double delta) {
  const double h = kGammaMax / kGammaGridIntervals;
  int best = 0;
  double best_value = objective(0.0, alpha, delta);
  for (int i = 1; i <= kGammaGridIntervals; ++i) {
    const double v = objective(i * h, alpha, delta);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  SupResult out;
  out.grid_resolution = h;
  out.sup_value = best_value;
  out.gamma_argmax = best * h;
  if (best_value <= 0.0) return out;

  // The maximiser lies in the two cells around the grid argmax when the
  // objective is unimodal there; the refined value is only accepted if it
  // improves on the grid.
  double lo = std::max(0.0, (best - 1) * h);
  double hi = std::min(kGammaMax, (best + 1) * h);
  while (hi - lo > kGammaTolerance) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective(m1, alpha, delta) < objective(m2, alpha, delta)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double g = 0.5 * (lo + hi);
  const double v = objective(g, alpha, delta);
  if (v > out.sup_value) {
    out.sup_value = v;
    out.gamma_argmax = g;
  }
  out.refined = true;
  return out;
}

bool feasibility_check(const PropositionQuery& query) {
  query.validate();
  if (!query.alpha) throw std::invalid_argument("feasibility_check requires alpha");
  return sup_over_gamma(*query.alpha, query.delta).sup_value <= 0.25 - query.eps;
}

double min_alpha(double delta, double eps) {
  PropositionQuery q{eps, delta, kAlphaCeiling};
  if (!feasibility_check(q)) {
    throw std::domain_error("condition infeasible even at alpha = " +
                            std::to_string(kAlphaCeiling));
  }
  q.alpha = 0.0;
  if (feasibility_check(q)) return 0.0;

  // Invariant: lo infeasible, hi feasible.
  double lo = 0.0;
  double hi = kAlphaCeiling;
  while (hi - lo > kAlphaTolerance) {
    const double mid = 0.5 * (lo + hi);
    q.alpha = mid;
    if (feasibility_check(q)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace majdyn
