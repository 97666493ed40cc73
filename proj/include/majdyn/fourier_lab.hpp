#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "majdyn/analytics.hpp"

namespace majdyn {

/// Sorted, duplicate-free set of vertex pairs {u, v}, u < v.
class EdgeSet {
 public:
  EdgeSet() = default;
  /// Pairs may come in either orientation; throws on self-pairs or duplicates.
  explicit EdgeSet(std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);

  std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

 private:
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
};

/// Largest edge universe enumerated exactly (2^22 weighted terms).
inline constexpr int kEnumerationCapEdges = 22;

/// Edge assignments are bitmasks over the universe: bit e set means x_e = +1
/// (edge present). Vertices [0, r0) are red, [r0, n) blue.
class TinyModel {
 public:
  TinyModel(std::uint32_t r0, std::uint32_t b0, double p);

  std::uint32_t r0() const noexcept { return r0_; }
  std::uint32_t b0() const noexcept { return b0_; }
  std::uint32_t n() const noexcept { return r0_ + b0_; }
  double p() const noexcept { return p_; }
  ModelParams params() const noexcept { return {r0_, b0_, p_}; }

  int edge_count() const noexcept { return static_cast<int>(universe_.size()); }
  std::uint64_t assignment_count() const noexcept { return 1ULL << universe_.size(); }
  std::pair<std::uint32_t, std::uint32_t> edge(int index) const { return universe_.at(index); }
  int edge_index(std::uint32_t u, std::uint32_t v) const;
  std::uint32_t mask_of(const EdgeSet& s) const;
  /// Mask of Gamma_v, the pairs containing v.
  std::uint32_t star_mask(std::uint32_t v) const;

  bool is_red(std::uint32_t v) const noexcept { return v < r0_; }
  int epsilon(std::uint32_t v) const noexcept { return is_red(v) ? 1 : -1; }
  /// mu_v for v's initial class.
  double mu_of(std::uint32_t v) const noexcept { return is_red(v) ? mu_r_ : mu_b_; }

  /// Red set after one majority step on the graph encoded by x, as a vertex
  /// bitmask. Built lazily by running the dense engine on each graph.
  std::uint32_t step_red_mask(std::uint32_t x) const;
  /// Z_v(x): 1 - mu_v if v keeps its colour, -1 - mu_v otherwise.
  double z(std::uint32_t v, std::uint32_t x) const;

 private:
  void build_step_table() const;

  std::uint32_t r0_;
  std::uint32_t b0_;
  double p_;
  double mu_r_ = 0.0;
  double mu_b_ = 0.0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> universe_;
  mutable std::vector<std::uint8_t> step_table_;
};

/// Phi_S(x) = prod_{e in S} (x_e + 1 - 2p) / (2 sqrt(p(1-p))).
double basis_eval(std::uint32_t s_mask, std::uint32_t x_mask, double p);
double basis_eval(const TinyModel& model, const EdgeSet& s, std::uint32_t x_mask);

/// Exact p-biased expectation by enumerating every assignment. Blocks of a
/// fixed size are summed with compensation and merged in index order, so the
/// result does not depend on `workers`.
double pbiased_expectation(const TinyModel& model, const std::function<double(std::uint32_t)>& f,
                           unsigned workers = 1);

/// E[Z_v Phi_S] by direct enumeration.
double brute_force_coefficient(const TinyModel& model, std::uint32_t v, const EdgeSet& s);

/// All 2^|E| coefficients of `values` (indexed by assignment) via the
/// p-biased butterfly; result is indexed by S mask.
std::vector<double> pbiased_spectrum(const TinyModel& model, std::vector<double> values);

enum class EdgeKind { RedRed, BlueBlue, RedBlue };

/// Single-edge coefficient of Z_v for an edge at v, from binomial differences:
///   RedRed   2 sqrt(pq) P(Bin(r0-2) - Bin(b0) = -1)
///   BlueBlue 2 sqrt(pq) P(Bin(b0-2) - Bin(r0) = -1)
///   RedBlue -2 sqrt(pq) P(Bin(r0-1) - Bin(b0-1) = 0)
double closed_form_coefficient(EdgeKind kind, std::int64_t r0, std::int64_t b0, double p);

struct VertexFourierReport {
  std::uint32_t vertex = 0;
  int epsilon = 1;
  double mu_v = 0.0;
  double mean_z = 0.0;
  double second_moment = 0.0;
  double one_minus_mu_sq = 0.0;
  double parseval_sum = 0.0;
  double coef_empty = 0.0;
  double max_off_star = 0.0;
  double max_single = 0.0;
  double max_multi = 0.0;
  double closed_form_max_diff = 0.0;
  double power_bound_excess = 0.0;  // max over L<=4, S != {} of |(Z^L)^(S)| - 2^L |Z^(S)|
  double max_abs_coef = 0.0;
};

struct FourierFactsReport {
  std::uint32_t r0 = 0;
  std::uint32_t b0 = 0;
  double p = 0.0;
  int k = 0;
  double sigma = 0.0;
  double mu = 0.0;
  std::vector<VertexFourierReport> vertices;

  // Worst-case deviations of the assertable identities.
  double err_mean_zero = 0.0;
  double err_second_moment = 0.0;
  double err_coef_empty = 0.0;
  double err_off_star = 0.0;
  double err_parseval = 0.0;
  double err_closed_form = 0.0;
  double err_power_bound = 0.0;  // positive part of power_bound_excess
  double err_star_reduction = 0.0;
  double max_abs_coef = 0.0;     // should not exceed 2

  // Magnitudes tabulated rather than asserted.
  double max_single = 0.0;
  double max_multi = 0.0;
  double max_star_sum = 0.0;
  double second_moment_gap = 0.0;  // max |(1 - mu_v^2) - 4 mu|

  bool passes(double tol) const noexcept;
  nlohmann::json to_json() const;
};

FourierFactsReport verify_fourier_facts(const TinyModel& model, int k = 1);

struct MomentReport {
  int k = 0;
  double value = 0.0;      // E[Z^k]
  double main_term = 0.0;  // (k-1)!! (4 n mu)^{k/2} for even k, else 0
  double error_scale = 0.0;  // n^{k/2} (1/sigma + Delta/n)
  std::optional<double> var_two_r1;      // k == 2: Var(2|R_1|) from the |R_1| histogram
  std::optional<double> fourier_value;   // k == 2: sum_{u,v} eps eps <Z_u^, Z_v^>

  nlohmann::json to_json() const;
};

/// E[Z^k] with Z = sum_v eps(v) Z_v, 1 <= k <= 6.
MomentReport moment_bruteforce(const TinyModel& model, int k);

/// Exact distribution of |R_1| over the enumerated graphs.
std::vector<double> red_count_distribution(const TinyModel& model);

}  // namespace majdyn
