#include "majdyn/graph.hpp"

#include <bit>
#include <ostream>
#include <stdexcept>
#include <string>

namespace majdyn {

void GraphSpec::validate() const {
  if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("edge probability must lie in (0,1)");
}

// --- Coloring ---------------------------------------------------------------

Coloring::Coloring(std::uint32_t n) : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64, 0) {}

Coloring Coloring::canonical(std::uint32_t n, std::uint32_t r0) {
  if (r0 > n) throw std::invalid_argument("more red vertices than vertices");
  Coloring c(n);
  const std::size_t full = r0 / 64;
  for (std::size_t w = 0; w < full; ++w) c.words_[w] = ~0ULL;
  if (r0 % 64 != 0) c.words_[full] = (1ULL << (r0 % 64)) - 1;
  c.red_count_ = r0;
  return c;
}

void Coloring::set_red(std::uint32_t v, bool red) {
  if (v >= n_) throw std::out_of_range("vertex out of range");
  const std::uint64_t bit = 1ULL << (v & 63);
  std::uint64_t& w = words_[v >> 6];
  const bool was = w & bit;
  if (was == red) return;
  w ^= bit;
  red_count_ += red ? 1 : -1;
}

void Coloring::clear_tail() noexcept {
  if (n_ % 64 != 0) words_.back() &= (1ULL << (n_ % 64)) - 1;
}

Coloring Coloring::swapped() const {
  Coloring c(*this);
  for (auto& w : c.words_) w = ~w;
  c.clear_tail();
  c.red_count_ = n_ - red_count_;
  return c;
}

bool Coloring::dominates(const Coloring& other) const {
  if (other.n_ != n_) throw std::invalid_argument("coloring size mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (other.words_[i] & ~words_[i]) return false;
  }
  return true;
}

std::uint64_t Coloring::hash() const noexcept {
  std::uint64_t h = mix64(n_);
  for (std::uint64_t w : words_) h = mix64(h ^ w) + kGolden;
  return h;
}

// --- DenseGraph -------------------------------------------------------------

DenseGraph::DenseGraph(std::uint32_t n)
    : n_(n),
      words_per_row_((static_cast<std::size_t>(n) + 63) / 64),
      bits_(words_per_row_ * n, 0),
      degree_(n, 0) {}

DenseGraph DenseGraph::sample(const EdgeOracle& oracle) {
  const std::uint32_t n = oracle.n();
  if (n > kDenseCap) {
    throw std::invalid_argument("n=" + std::to_string(n) + " exceeds the dense cap of " +
                                std::to_string(kDenseCap) + "; use the implicit engine");
  }
  DenseGraph g(n);
  for (std::uint32_t u = 0; u + 1 < n; ++u) {
    std::uint64_t* row = g.bits_.data() + static_cast<std::size_t>(u) * g.words_per_row_;
    for (std::size_t w = (u + 1) / 64; w < g.words_per_row_; ++w) {
      const auto base = static_cast<std::uint32_t>(w * 64);
      std::uint64_t bits = 0;
      // Fixed trip count so the hash vectorises; invalid lanes are masked after.
      const std::uint64_t index0 = (static_cast<std::uint64_t>(u) << 32) | base;
      for (std::uint64_t j = 0; j < 64; ++j) {
        bits |= static_cast<std::uint64_t>(oracle.present_index(index0 + j)) << j;
      }
      if (n - base < 64) bits &= (1ULL << (n - base)) - 1;
      if (base <= u) bits &= ~((2ULL << (u - base)) - 1);
      row[w] = bits;
    }
  }
  g.mirror_upper_triangle();
  return g;
}

DenseGraph DenseGraph::from_edges(
    std::uint32_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  if (n > kDenseCap) throw std::invalid_argument("n exceeds the dense cap");
  DenseGraph g(n);
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop in edge list");
    if (a >= n || b >= n) throw std::out_of_range("edge endpoint out of range");
    const std::uint32_t u = std::min(a, b);
    const std::uint32_t v = std::max(a, b);
    g.bits_[static_cast<std::size_t>(u) * g.words_per_row_ + (v >> 6)] |= 1ULL << (v & 63);
  }
  g.mirror_upper_triangle();
  return g;
}

void DenseGraph::mirror_upper_triangle() {
  for (std::uint32_t u = 0; u < n_; ++u) {
    const std::uint64_t* row = bits_.data() + static_cast<std::size_t>(u) * words_per_row_;
    for (std::size_t w = (u + 1) / 64; w < words_per_row_; ++w) {
      std::uint64_t bits = row[w];
      if (w == u / 64) bits &= ~((2ULL << (u & 63)) - 1);  // strictly above the diagonal
      while (bits) {
        const auto v = static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
        bits_[static_cast<std::size_t>(v) * words_per_row_ + (u >> 6)] |= 1ULL << (u & 63);
      }
    }
  }
  for (std::uint32_t v = 0; v < n_; ++v) {
    std::uint32_t d = 0;
    for (std::uint64_t w : row(v)) d += static_cast<std::uint32_t>(std::popcount(w));
    degree_[v] = d;
  }
}

std::uint64_t DenseGraph::edge_count() const noexcept {
  std::uint64_t total = 0;
  for (std::uint32_t d : degree_) total += d;
  return total / 2;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> DenseGraph::edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  out.reserve(edge_count());
  for (std::uint32_t u = 0; u < n_; ++u) {
    for (std::uint32_t v = u + 1; v < n_; ++v) {
      if (adjacent(u, v)) out.emplace_back(u, v);
    }
  }
  return out;
}

void DenseGraph::write_edge_list(std::ostream& out) const {
  for (auto [u, v] : edges()) out << u << ' ' << v << '\n';
}

// --- engines ----------------------------------------------------------------

bool edge_present(const GraphSpec& spec, std::uint32_t u, std::uint32_t v) {
  return spec.oracle().present(u, v);
}

DenseGraph sample_dense(const GraphSpec& spec) {
  spec.validate();
  return DenseGraph::sample(spec.oracle());
}

Coloring majority_step(const DenseGraph& graph, const Coloring& coloring) {
  if (coloring.n() != graph.n()) throw std::invalid_argument("coloring/graph size mismatch");
  const auto red = coloring.words();
  Coloring next(coloring);
  for (std::uint32_t v = 0; v < graph.n(); ++v) {
    const auto row = graph.row(v);
    std::uint32_t d_red = 0;
    for (std::size_t w = 0; w < row.size(); ++w) {
      d_red += static_cast<std::uint32_t>(std::popcount(row[w] & red[w]));
    }
    const std::uint32_t twice = 2 * d_red;
    const std::uint32_t deg = graph.degree(v);
    if (twice > deg) {
      next.set_red(v, true);
    } else if (twice < deg) {
      next.set_red(v, false);
    }
  }
  return next;
}

std::vector<std::int64_t> red_excess(const EdgeOracle& oracle, const Coloring& coloring) {
  if (coloring.n() != oracle.n()) throw std::invalid_argument("coloring/graph size mismatch");
  std::vector<std::int64_t> weight(oracle.n());
  for (std::uint32_t v = 0; v < oracle.n(); ++v) weight[v] = coloring.is_red(v) ? 1 : -1;
  std::vector<std::int64_t> acc(oracle.n(), 0);
  accumulate_neighbor_weights(oracle, weight, acc);
  return acc;
}

Coloring majority_step(const ImplicitGraph& graph, const Coloring& coloring) {
  const std::vector<std::int64_t> excess = red_excess(graph.oracle(), coloring);
  Coloring next(coloring);
  for (std::uint32_t v = 0; v < graph.n(); ++v) {
    if (excess[v] > 0) {
      next.set_red(v, true);
    } else if (excess[v] < 0) {
      next.set_red(v, false);
    }
  }
  return next;
}

std::uint32_t red_count_after_one_step(const GraphSpec& spec, const Coloring& coloring) {
  spec.validate();
  const std::vector<std::int64_t> excess = red_excess(spec.oracle(), coloring);
  std::uint32_t red = 0;
  for (std::uint32_t v = 0; v < spec.n; ++v) {
    red += excess[v] > 0 || (excess[v] == 0 && coloring.is_red(v));
  }
  return red;
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::UnanimousRed: return "unanimous_red";
    case Outcome::UnanimousBlue: return "unanimous_blue";
    case Outcome::FixedPoint: return "fixed_point";
    case Outcome::TwoCycle: return "two_cycle";
    case Outcome::StepCap: return "step_cap";
  }
  return "unknown";
}

nlohmann::json Trajectory::to_json() const {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < red_counts.size(); ++i) {
    steps.push_back({{"step", i}, {"red", red_counts[i]}});
  }
  return nlohmann::json{{"steps", std::move(steps)},
                        {"outcome", std::string(to_string(outcome))},
                        {"steps_to_outcome", steps_to_outcome}};
}

Trajectory run_dynamics(const GraphSpec& spec, Coloring initial, int max_steps) {
  spec.validate();
  if (spec.representation == Representation::Dense) {
    const DenseGraph g = sample_dense(spec);
    return run_dynamics(g, std::move(initial), max_steps);
  }
  const ImplicitGraph g(spec.oracle());
  return run_dynamics(g, std::move(initial), max_steps);
}

}  // namespace majdyn
