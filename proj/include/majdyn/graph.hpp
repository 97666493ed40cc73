#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "majdyn/edge_oracle.hpp"

namespace majdyn {

enum class Representation { Dense, Implicit };

struct GraphSpec {
  std::uint32_t n = 1;
  double p = 0.5;
  std::uint64_t seed = 0;
  Representation representation = Representation::Dense;

  void validate() const;
  EdgeOracle oracle() const { return EdgeOracle(n, p, seed); }
};

/// Largest vertex count materialised as a bit matrix (n^2/8 bytes = 128 MB).
inline constexpr std::uint32_t kDenseCap = 32'768;

/// Red-membership bit vector with a cached red count.
class Coloring {
 public:
  explicit Coloring(std::uint32_t n = 0);  // all blue
  /// Vertices [0, r0) red, the rest blue.
  static Coloring canonical(std::uint32_t n, std::uint32_t r0);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t red_count() const noexcept { return red_count_; }
  std::uint32_t blue_count() const noexcept { return n_ - red_count_; }
  bool unanimous_red() const noexcept { return red_count_ == n_; }
  bool unanimous_blue() const noexcept { return red_count_ == 0; }

  bool is_red(std::uint32_t v) const noexcept { return (words_[v >> 6] >> (v & 63)) & 1U; }
  void set_red(std::uint32_t v, bool red);

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  Coloring swapped() const;
  /// Red set of *this contains the red set of `other`.
  bool dominates(const Coloring& other) const;
  std::uint64_t hash() const noexcept;

  friend bool operator==(const Coloring& a, const Coloring& b) noexcept {
    return a.n_ == b.n_ && a.red_count_ == b.red_count_ && a.words_ == b.words_;
  }

 private:
  void clear_tail() noexcept;

  std::uint32_t n_;
  std::uint32_t red_count_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Symmetric bit-packed adjacency, no self-loops.
class DenseGraph {
 public:
  /// Materialises every pair from the oracle.
  static DenseGraph sample(const EdgeOracle& oracle);
  static DenseGraph from_edges(std::uint32_t n,
                               std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

  std::uint32_t n() const noexcept { return n_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }
  std::span<const std::uint64_t> row(std::uint32_t v) const noexcept {
    return {bits_.data() + static_cast<std::size_t>(v) * words_per_row_, words_per_row_};
  }
  bool adjacent(std::uint32_t u, std::uint32_t v) const noexcept {
    return (row(u)[v >> 6] >> (v & 63)) & 1U;
  }
  std::uint32_t degree(std::uint32_t v) const noexcept { return degree_[v]; }
  std::uint64_t edge_count() const noexcept;

  /// Pairs (u, v) with u < v in lexicographic order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;
  /// One "u v" line per edge, u < v.
  void write_edge_list(std::ostream& out) const;

 private:
  DenseGraph(std::uint32_t n);
  void mirror_upper_triangle();

  std::uint32_t n_;
  std::size_t words_per_row_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint32_t> degree_;
};

/// G(n,p) accessed through its edge oracle only.
class ImplicitGraph {
 public:
  explicit ImplicitGraph(EdgeOracle oracle) : oracle_(oracle) {}
  std::uint32_t n() const noexcept { return oracle_.n(); }
  const EdgeOracle& oracle() const noexcept { return oracle_; }
  bool adjacent(std::uint32_t u, std::uint32_t v) const { return oracle_.present(u, v); }

 private:
  EdgeOracle oracle_;
};

bool edge_present(const GraphSpec& spec, std::uint32_t u, std::uint32_t v);

/// Rejects n above kDenseCap.
DenseGraph sample_dense(const GraphSpec& spec);

/// Synchronous update: red iff more red than blue neighbours, blue iff more
/// blue, unchanged on ties (isolated vertices never move).
Coloring majority_step(const DenseGraph& graph, const Coloring& coloring);
Coloring majority_step(const ImplicitGraph& graph, const Coloring& coloring);

/// d_R(v) - d_B(v) for every v, streamed from the oracle in O(n) memory.
std::vector<std::int64_t> red_excess(const EdgeOracle& oracle, const Coloring& coloring);

/// |R_1| without materialising the graph.
std::uint32_t red_count_after_one_step(const GraphSpec& spec, const Coloring& coloring);

enum class Outcome { UnanimousRed, UnanimousBlue, FixedPoint, TwoCycle, StepCap };
std::string_view to_string(Outcome outcome) noexcept;

struct Trajectory {
  std::vector<std::uint32_t> red_counts;  // |R_0| .. |R_T|
  Outcome outcome = Outcome::StepCap;
  int steps_to_outcome = 0;

  nlohmann::json to_json() const;
};

/// Step-by-step majority dynamics with absorption and period detection.
/// Unanimity ends the run at once; a non-unanimous state equal to its
/// predecessor is a FixedPoint; equal to the state two steps back, a TwoCycle.
template <class Graph>
class DynamicsRun {
 public:
  DynamicsRun(const Graph& graph, Coloring initial, int max_steps)
      : graph_(&graph), max_steps_(max_steps), current_(std::move(initial)) {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    if (current_.n() != graph.n()) throw std::invalid_argument("coloring/graph size mismatch");
    trajectory_.red_counts.push_back(current_.red_count());
    classify_absorbing();
  }

  bool done() const noexcept { return done_; }
  int steps() const noexcept { return step_; }
  const Coloring& current() const noexcept { return current_; }
  const Trajectory& trajectory() const noexcept { return trajectory_; }

  void step() {
    if (done_) return;
    Coloring next = majority_step(*graph_, current_);
    ++step_;
    trajectory_.red_counts.push_back(next.red_count());
    if (step_ >= 2) older_ = std::move(previous_);
    previous_ = std::move(current_);
    current_ = std::move(next);
    if (classify_absorbing()) return;
    if (current_ == previous_) {
      finish(Outcome::FixedPoint);
    } else if (step_ >= 2 && current_ == older_) {
      finish(Outcome::TwoCycle);
    } else if (step_ >= max_steps_) {
      finish(Outcome::StepCap);
    }
  }

  Trajectory run() && {
    while (!done_) step();
    return std::move(trajectory_);
  }

 private:
  bool classify_absorbing() {
    if (current_.unanimous_red()) {
      finish(Outcome::UnanimousRed);
    } else if (current_.unanimous_blue()) {
      finish(Outcome::UnanimousBlue);
    }
    return done_;
  }
  void finish(Outcome o) {
    done_ = true;
    trajectory_.outcome = o;
    trajectory_.steps_to_outcome = step_;
  }

  const Graph* graph_;
  int max_steps_;
  int step_ = 0;
  bool done_ = false;
  Coloring current_;
  Coloring previous_;
  Coloring older_;
  Trajectory trajectory_;
};

template <class Graph>
Trajectory run_dynamics(const Graph& graph, Coloring initial, int max_steps) {
  return DynamicsRun<Graph>(graph, std::move(initial), max_steps).run();
}

/// Dispatches on spec.representation.
Trajectory run_dynamics(const GraphSpec& spec, Coloring initial, int max_steps);

}  // namespace majdyn
