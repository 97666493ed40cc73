#include "majdyn/fourier_lab.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "majdyn/graph.hpp"
#include "majdyn/numerics.hpp"
#include "majdyn/summation.hpp"

namespace majdyn {

EdgeSet::EdgeSet(std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) : pairs_(std::move(pairs)) {
  for (auto& [u, v] : pairs_) {
    if (u == v) throw std::invalid_argument("edge set contains a self-pair");
    if (u > v) std::swap(u, v);
  }
  std::sort(pairs_.begin(), pairs_.end());
  if (std::adjacent_find(pairs_.begin(), pairs_.end()) != pairs_.end()) {
    throw std::invalid_argument("edge set contains a duplicate pair");
  }
}

// --- TinyModel ----------------------------------------------------------

TinyModel::TinyModel(std::uint32_t r0, std::uint32_t b0, double p) : r0_(r0), b0_(b0), p_(p) {
  require_probability(p, "p");
  const std::uint64_t n = static_cast<std::uint64_t>(r0) + b0;
  if (n < 2) throw std::invalid_argument("tiny model needs at least two vertices");
  if (n * (n - 1) / 2 > static_cast<std::uint64_t>(kEnumerationCapEdges)) {
    throw std::invalid_argument("edge universe of " + std::to_string(n * (n - 1) / 2) +
                                " pairs exceeds the enumeration cap of " +
                                std::to_string(kEnumerationCapEdges));
  }
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) universe_.emplace_back(u, v);
  }
  const ModelParams params{r0, b0, p};
  if (r0 > 0) mu_r_ = mu_v(params, Color::Red);
  if (b0 > 0) mu_b_ = mu_v(params, Color::Blue);
  build_step_table();
}

int TinyModel::edge_index(std::uint32_t u, std::uint32_t v) const {
  if (u > v) std::swap(u, v);
  const auto it = std::lower_bound(universe_.begin(), universe_.end(), std::pair{u, v});
  if (u == v || v >= n() || it == universe_.end() || *it != std::pair{u, v}) {
    throw std::invalid_argument("pair is not in the edge universe");
  }
  return static_cast<int>(it - universe_.begin());
}

std::uint32_t TinyModel::mask_of(const EdgeSet& s) const {
  std::uint32_t mask = 0;
  for (auto [u, v] : s.pairs()) mask |= 1U << edge_index(u, v);
  return mask;
}

std::uint32_t TinyModel::star_mask(std::uint32_t v) const {
  std::uint32_t mask = 0;
  for (int e = 0; e < edge_count(); ++e) {
    if (universe_[e].first == v || universe_[e].second == v) mask |= 1U << e;
  }
  return mask;
}

void TinyModel::build_step_table() const {
  const Coloring initial = Coloring::canonical(n(), r0_);
  step_table_.resize(assignment_count());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint64_t x = 0; x < assignment_count(); ++x) {
    edges.clear();
    for (int e = 0; e < edge_count(); ++e) {
      if ((x >> e) & 1U) edges.push_back(universe_[e]);
    }
    const Coloring next = majority_step(DenseGraph::from_edges(n(), edges), initial);
    step_table_[x] = static_cast<std::uint8_t>(next.words()[0]);
  }
}

std::uint32_t TinyModel::step_red_mask(std::uint32_t x) const { return step_table_[x]; }

double TinyModel::z(std::uint32_t v, std::uint32_t x) const {
  const bool red_after = (step_table_[x] >> v) & 1U;
  const double mu = mu_of(v);
  return red_after == is_red(v) ? 1.0 - mu : -1.0 - mu;
}

// --- expectations -------------------------------------------------------

double basis_eval(std::uint32_t s_mask, std::uint32_t x_mask, double p) {
  const double root = std::sqrt(p * (1.0 - p));
  const double up = (2.0 - 2.0 * p) / (2.0 * root);
  const double down = -2.0 * p / (2.0 * root);
  double out = 1.0;
  for (std::uint32_t s = s_mask; s != 0; s &= s - 1) {
    const int e = std::countr_zero(s);
    out *= ((x_mask >> e) & 1U) ? up : down;
  }
  return out;
}

double basis_eval(const TinyModel& model, const EdgeSet& s, std::uint32_t x_mask) {
  return basis_eval(model.mask_of(s), x_mask, model.p());
}

namespace {

constexpr std::uint64_t kBlockSize = 1U << 12;

std::vector<double> assignment_weights(const TinyModel& model) {
  const int edges = model.edge_count();
  std::vector<double> by_count(edges + 1);
  for (int c = 0; c <= edges; ++c) {
    by_count[c] = std::pow(model.p(), c) * std::pow(1.0 - model.p(), edges - c);
  }
  return by_count;
}

}  // namespace

double pbiased_expectation(const TinyModel& model, const std::function<double(std::uint32_t)>& f,
                           unsigned workers) {
  const std::vector<double> weight = assignment_weights(model);
  const std::uint64_t total = model.assignment_count();
  const std::uint64_t blocks = (total + kBlockSize - 1) / kBlockSize;
  std::vector<CompensatedSum> partial(blocks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) {
      CompensatedSum s;
      const std::uint64_t end = std::min(total, (b + 1) * kBlockSize);
      for (std::uint64_t x = b * kBlockSize; x < end; ++x) {
        const auto xi = static_cast<std::uint32_t>(x);
        s += weight[std::popcount(xi)] * f(xi);
      }
      partial[b] = s;
    }
  };
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(blocks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
  }
  CompensatedSum sum;
  for (const auto& s : partial) sum.add(s);
  return sum.value();
}

double brute_force_coefficient(const TinyModel& model, std::uint32_t v, const EdgeSet& s) {
  if (v >= model.n()) throw std::out_of_range("vertex out of range");
  const std::uint32_t mask = model.mask_of(s);
  const double p = model.p();
  return pbiased_expectation(model, [&](std::uint32_t x) {
    return model.z(v, x) * basis_eval(mask, x, p);
  });
}

std::vector<double> pbiased_spectrum(const TinyModel& model, std::vector<double> values) {
  if (values.size() != model.assignment_count()) {
    throw std::invalid_argument("value table must cover every assignment");
  }
  const double p = model.p();
  const double q = 1.0 - p;
  const double root = std::sqrt(p * q);
  for (int e = 0; e < model.edge_count(); ++e) {
    const std::size_t bit = std::size_t{1} << e;
    for (std::size_t x = 0; x < values.size(); ++x) {
      if (x & bit) continue;
      const double absent = values[x];
      const double present = values[x | bit];
      values[x] = q * absent + p * present;
      values[x | bit] = root * (present - absent);
    }
  }
  return values;
}

double closed_form_coefficient(EdgeKind kind, std::int64_t r0, std::int64_t b0, double p) {
  require_probability(p, "p");
  const double scale = 2.0 * std::sqrt(p * (1.0 - p));
  switch (kind) {
    case EdgeKind::RedRed:
      if (r0 < 2 || b0 < 0) throw std::invalid_argument("red-red edge needs r0 >= 2");
      return scale * diff_distribution(r0 - 2, b0, p).pmf(-1);
    case EdgeKind::BlueBlue:
      if (b0 < 2 || r0 < 0) throw std::invalid_argument("blue-blue edge needs b0 >= 2");
      return scale * diff_distribution(b0 - 2, r0, p).pmf(-1);
    case EdgeKind::RedBlue:
      if (r0 < 1 || b0 < 1) throw std::invalid_argument("red-blue edge needs r0, b0 >= 1");
      return -scale * diff_distribution(r0 - 1, b0 - 1, p).pmf(0);
  }
  throw std::invalid_argument("unknown edge kind");
}

// --- Fourier facts report----------------------------------------------------

namespace {

std::vector<double> z_table(const TinyModel& model, std::uint32_t v) {
  std::vector<double> z(model.assignment_count());
  for (std::uint64_t x = 0; x < z.size(); ++x) z[x] = model.z(v, static_cast<std::uint32_t>(x));
  return z;
}

double weighted_mean(const std::vector<double>& weight, const std::vector<double>& values) {
  CompensatedSum s;
  for (std::uint64_t x = 0; x < values.size(); ++x) {
    s += weight[std::popcount(static_cast<std::uint32_t>(x))] * values[x];
  }
  return s.value();
}

}  // namespace

bool FourierFactsReport::passes(double tol) const noexcept {
  return err_mean_zero <= tol && err_second_moment <= tol && err_coef_empty <= tol &&
         err_off_star <= tol && err_parseval <= tol && err_closed_form <= tol &&
         err_power_bound <= tol && err_star_reduction <= tol && max_abs_coef <= 2.0 + tol;
}

FourierFactsReport verify_fourier_facts(const TinyModel& model, int k) {
  if (k < 1) throw std::invalid_argument("moment order must be positive");
  FourierFactsReport rep;
  rep.r0 = model.r0();
  rep.b0 = model.b0();
  rep.p = model.p();
  rep.k = k;
  rep.sigma = model.params().sigma();
  rep.mu = mu(model.params());

  const auto weight = assignment_weights(model);
  const int edges = model.edge_count();
  const auto max_set = static_cast<int>(std::min<long>(10L * k * k, edges));
  std::vector<std::vector<double>> single(model.n(), std::vector<double>(edges));

  for (std::uint32_t v = 0; v < model.n(); ++v) {
    VertexFourierReport vr;
    vr.vertex = v;
    vr.epsilon = model.epsilon(v);
    vr.mu_v = model.mu_of(v);
    vr.one_minus_mu_sq = 1.0 - vr.mu_v * vr.mu_v;

    const std::vector<double> z = z_table(model, v);
    std::vector<double> z2(z.size());
    for (std::size_t x = 0; x < z.size(); ++x) z2[x] = z[x] * z[x];
    vr.mean_z = weighted_mean(weight, z);
    vr.second_moment = weighted_mean(weight, z2);

    const std::vector<double> coef = pbiased_spectrum(model, z);
    vr.coef_empty = coef[0];
    CompensatedSum parseval;
    const std::uint32_t star = model.star_mask(v);
    for (std::uint32_t s = 0; s < coef.size(); ++s) {
      parseval += coef[s] * coef[s];
      if (s == 0) continue;
      const double a = std::fabs(coef[s]);
      vr.max_abs_coef = std::max(vr.max_abs_coef, a);
      if (s & ~star) {
        vr.max_off_star = std::max(vr.max_off_star, a);
      } else if (std::popcount(s) == 1) {
        vr.max_single = std::max(vr.max_single, a);
      } else if (std::popcount(s) <= max_set) {
        vr.max_multi = std::max(vr.max_multi, a);
      }
    }
    vr.parseval_sum = parseval.value();
    for (int e = 0; e < edges; ++e) single[v][e] = coef[1U << e];

    for (int e = 0; e < edges; ++e) {
      if (!((star >> e) & 1U)) continue;
      const auto [a, b] = model.edge(e);
      const std::uint32_t w = a == v ? b : a;
      const EdgeKind kind = model.is_red(v) == model.is_red(w)
                                ? (model.is_red(v) ? EdgeKind::RedRed : EdgeKind::BlueBlue)
                                : EdgeKind::RedBlue;
      const double brute = brute_force_coefficient(model, v, EdgeSet({{a, b}}));
      const double closed = closed_form_coefficient(kind, model.r0(), model.b0(), model.p());
      vr.closed_form_max_diff = std::max(vr.closed_form_max_diff, std::fabs(brute - closed));
    }

    vr.power_bound_excess = -std::numeric_limits<double>::infinity();
    std::vector<double> power = z;
    for (int L = 1; L <= 4; ++L) {
      if (L > 1) {
        for (std::size_t x = 0; x < power.size(); ++x) power[x] *= z[x];
      }
      const std::vector<double> cl = pbiased_spectrum(model, power);
      const double bound = std::ldexp(1.0, L);
      for (std::size_t s = 1; s < cl.size(); ++s) {
        vr.power_bound_excess =
            std::max(vr.power_bound_excess, std::fabs(cl[s]) - bound * std::fabs(coef[s]));
      }
    }

    rep.err_mean_zero = std::max(rep.err_mean_zero, std::fabs(vr.mean_z));
    rep.err_second_moment =
        std::max(rep.err_second_moment, std::fabs(vr.second_moment - vr.one_minus_mu_sq));
    rep.err_coef_empty = std::max(rep.err_coef_empty, std::fabs(vr.coef_empty));
    rep.err_off_star = std::max(rep.err_off_star, vr.max_off_star);
    rep.err_parseval = std::max(rep.err_parseval, std::fabs(vr.parseval_sum - vr.second_moment));
    rep.err_closed_form = std::max(rep.err_closed_form, vr.closed_form_max_diff);
    rep.err_power_bound = std::max(rep.err_power_bound, std::max(0.0, vr.power_bound_excess));
    rep.max_abs_coef = std::max(rep.max_abs_coef, vr.max_abs_coef);
    rep.max_single = std::max(rep.max_single, vr.max_single);
    rep.max_multi = std::max(rep.max_multi, vr.max_multi);
    rep.second_moment_gap = std::max(rep.second_moment_gap, std::fabs(vr.one_minus_mu_sq - 4.0 * rep.mu));
    rep.vertices.push_back(vr);
  }

  // sum_e (Z_r^(e) - Z_b^(e)) Z_v^(e) collapses to the rv and bv terms.
  for (std::uint32_t r = 0; r < model.r0(); ++r) {
    for (std::uint32_t b = model.r0(); b < model.n(); ++b) {
      for (std::uint32_t v = 0; v < model.n(); ++v) {
        if (v == r || v == b) continue;
        CompensatedSum full;
        for (int e = 0; e < edges; ++e) full += (single[r][e] - single[b][e]) * single[v][e];
        const int rv = model.edge_index(r, v);
        const int bv = model.edge_index(b, v);
        const double reduced = single[r][rv] * single[v][rv] - single[b][bv] * single[v][bv];
        rep.err_star_reduction = std::max(rep.err_star_reduction, std::fabs(full.value() - reduced));
        rep.max_star_sum = std::max(rep.max_star_sum, std::fabs(full.value()));
      }
    }
  }
  return rep;
}

nlohmann::json FourierFactsReport::to_json() const {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vertices) {
    verts.push_back({{"vertex", v.vertex},
                     {"epsilon", v.epsilon},
                     {"mu_v", v.mu_v},
                     {"mean_z", v.mean_z},
                     {"second_moment", v.second_moment},
                     {"one_minus_mu_sq", v.one_minus_mu_sq},
                     {"parseval_sum", v.parseval_sum},
                     {"coef_empty", v.coef_empty},
                     {"max_off_star", v.max_off_star},
                     {"max_single", v.max_single},
                     {"max_multi", v.max_multi},
                     {"closed_form_max_diff", v.closed_form_max_diff},
                     {"power_bound_excess", v.power_bound_excess},
                     {"max_abs_coef", v.max_abs_coef}});
  }
  const double n = static_cast<double>(r0 + b0);
  return nlohmann::json{
      {"r0", r0},
      {"b0", b0},
      {"p", p},
      {"k", k},
      {"sigma", sigma},
      {"mu", mu},
      {"checks",
       {{"mean_zero", err_mean_zero},
        {"second_moment", err_second_moment},
        {"coef_empty", err_coef_empty},
        {"off_star", err_off_star},
        {"parseval", err_parseval},
        {"closed_form", err_closed_form},
        {"power_bound", err_power_bound},
        {"star_reduction", err_star_reduction},
        {"max_abs_coef", max_abs_coef}}},
      {"magnitudes",
       {{"max_single", max_single},
        {"sqrt_n_times_max_single", std::sqrt(n) * max_single},
        {"max_multi", max_multi},
        {"n_times_max_multi", n * max_multi},
        {"max_star_sum", max_star_sum},
        {"n_sigma_times_max_star_sum", n * sigma * max_star_sum},
        {"second_moment_gap", second_moment_gap},
        {"sigma_times_second_moment_gap", sigma * second_moment_gap}}},
      {"vertices", std::move(verts)}};
}

// --- moments ------------------------------------------------------------

std::vector<double> red_count_distribution(const TinyModel& model) {
  const auto weight = assignment_weights(model);
  std::vector<CompensatedSum> hist(model.n() + 1);
  for (std::uint64_t x = 0; x < model.assignment_count(); ++x) {
    const auto xi = static_cast<std::uint32_t>(x);
    hist[std::popcount(model.step_red_mask(xi))] += weight[std::popcount(xi)];
  }
  std::vector<double> out;
  for (const auto& h : hist) out.push_back(h.value());
  return out;
}

MomentReport moment_bruteforce(const TinyModel& model, int k) {
  if (k < 1 || k > 6) throw std::invalid_argument("moment order must lie in [1, 6]");
  const auto weight = assignment_weights(model);
  const std::uint64_t total = model.assignment_count();

  std::vector<double> zsum(total, 0.0);
  for (std::uint64_t x = 0; x < total; ++x) {
    double s = 0.0;
    for (std::uint32_t v = 0; v < model.n(); ++v) {
      s += model.epsilon(v) * model.z(v, static_cast<std::uint32_t>(x));
    }
    zsum[x] = s;
  }

  MomentReport rep;
  rep.k = k;
  CompensatedSum moment;
  for (std::uint64_t x = 0; x < total; ++x) {
    moment += weight[std::popcount(static_cast<std::uint32_t>(x))] * std::pow(zsum[x], k);
  }
  rep.value = moment.value();

  const ModelParams params = model.params();
  const double n = static_cast<double>(model.n());
  const double mu_val = mu(params);
  if (k % 2 == 0) {
    double double_factorial = 1.0;
    for (int j = k - 1; j > 1; j -= 2) double_factorial *= j;
    rep.main_term = double_factorial * std::pow(4.0 * n * mu_val, k / 2.0);
  }
  rep.error_scale =
      std::pow(n, k / 2.0) * (1.0 / params.sigma() + static_cast<double>(params.delta()) / n);

  if (k == 2) {
    const std::vector<double> dist = red_count_distribution(model);
    CompensatedSum m1, m2;
    for (std::size_t r = 0; r < dist.size(); ++r) {
      m1 += 2.0 * static_cast<double>(r) * dist[r];
      m2 += 4.0 * static_cast<double>(r * r) * dist[r];
    }
    rep.var_two_r1 = m2.value() - m1.value() * m1.value();

    std::vector<double> combined(total, 0.0);
    for (std::uint32_t v = 0; v < model.n(); ++v) {
      const std::vector<double> coef = pbiased_spectrum(model, z_table(model, v));
      for (std::size_t s = 0; s < total; ++s) combined[s] += model.epsilon(v) * coef[s];
    }
    CompensatedSum plancherel;
    for (double c : combined) plancherel += c * c;
    rep.fourier_value = plancherel.value();
  }
  return rep;
}

nlohmann::json MomentReport::to_json() const {
  nlohmann::json j{{"k", k}, {"value", value}, {"main_term", main_term}, {"error_scale", error_scale}};
  if (var_two_r1) j["var_two_r1"] = *var_two_r1;
  if (fourier_value) j["fourier_value"] = *fourier_value;
  return j;
}

}  // namespace majdyn
