#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "majdyn/analytics.hpp"
#include "majdyn/graph.hpp"
#include "majdyn/stats.hpp"

namespace majdyn {

enum class ExperimentKind { Clt, Fixation, Proposition, Swing, ConjectureScan, Steps };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);

/// Parameters for every experiment; each kind reads the fields it needs.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Clt;
  std::uint32_t n = 0;
  double p = 0.5;
  std::uint32_t r0 = 0;
  std::uint32_t b0 = 0;
  std::uint32_t delta = 0;  // fixation: size of the extra block X
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  int max_steps = 100;
  double alpha = kFixationAlpha;
  double delta_frac = 0.499;
  std::uint32_t m = 0;  // swing: |R| = |B|
  std::uint32_t x = 0;  // swing: |X|
  int step_horizon = 4;    // steps experiment: success means unanimity within this many steps
  std::uint32_t traces = 20;  // fixation: trials whose red-count traces are kept
  Representation representation = Representation::Dense;
  std::string output_path;

  /// Throws std::invalid_argument when the target experiment cannot run.
  void validate() const;
  /// Echo of the fields used by `kind`.
  nlohmann::json to_json() const;
  /// Reads keys named as in to_json(); missing keys keep their current value.
  void merge_json(const nlohmann::json& j);
};

/// Seed of trial i.
std::uint64_t trial_seed(const ExperimentConfig& config, std::uint64_t trial) noexcept;

/// Persisted result: config echo, seeds, summary and one scalar per trial.
struct ExperimentRecord {
  ExperimentConfig config;
  nlohmann::json summary;
  std::string sample_name;  // what the per-trial value is
  std::vector<double> samples;

  nlohmann::json to_json() const;
  /// Header "trial,value", then one row per trial. Integral values print
  /// without a fractional part; others with 17 significant digits.
  void write_samples_csv(std::ostream& out) const;
};

// --- CLT ----------------------------------------------------------------------

struct CltResult {
  ModelParams params;
  Predictions predictions;
  std::vector<double> red_counts;  // |R_1| per trial
  SummaryStats stats;
  std::optional<double> variance_ratio;  // empirical Var / (n mu)
  std::optional<double> ks;               // of the standardized samples
  /// Smallest tail constant c consistent with the observed lower tail at
  /// t = 1, 2, 3, 4 (absent when it is not defined for the sample).
  std::optional<double> tail_constant;

  nlohmann::json summary_json() const;
};
CltResult run_clt_experiment(const ExperimentConfig& config, unsigned workers = 1);

// --- fixation -----------------------------------------------------------------

enum class Winner : std::uint8_t { Red, Blue, Tie };
char to_char(Winner w) noexcept;
Winner winner_of(Outcome outcome) noexcept;

struct FixationTrial {
  Winner with_x_red = Winner::Tie;   // W(R)
  Winner with_x_blue = Winner::Tie;  // W(B)
  int steps_x_red = 0;
  int steps_x_blue = 0;
  bool domination_held = true;
  std::vector<std::uint32_t> trace_x_red;   // kept for the first `traces` trials
  std::vector<std::uint32_t> trace_x_blue;
};

struct FixationResult {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint32_t delta = 0;
  double p = 0.0;
  std::uint64_t trials = 0;
  std::vector<FixationTrial> per_trial;

  std::uint64_t red_wins = 0;    // W(R) = R
  std::uint64_t blue_wins = 0;   // W(R) = B
  std::uint64_t ties = 0;        // W(R) = T
  std::uint64_t both_own = 0;    // W(B) = B and W(R) = R
  std::uint64_t coupling_violations = 0;    // W(R) = B and W(B) = R
  std::uint64_t domination_violations = 0;  // some step where R-set of X-red run is not a superset
  double p_red = 0.0;
  double p_blue = 0.0;
  double advantage = 0.0;  // p_red - p_blue
  double advantage_se = 0.0;
  double z_score = 0.0;
  double asymptotic_bound = 0.0;
  double unanimous_within_four = 0.0;  // fraction of X-red runs unanimous in <= 4 steps
  std::vector<std::uint64_t> steps_histogram;  // X-red run, indexed by steps_to_outcome

  nlohmann::json summary_json() const;
};
FixationResult run_fixation_experiment(const ExperimentConfig& config, unsigned workers = 1);

// --- fixed-R proposition check --------------------------------------------------

struct PropositionResult {
  std::uint32_t n = 0;
  double p = 0.0;
  double alpha = 0.0;
  double delta_frac = 0.0;
  std::uint32_t red_size = 0;
  std::vector<double> counts;  // vertices with d_{V\R} >= d_R, per trial
  std::uint64_t failures = 0;  // trials with count > delta_frac n
  double failure_rate = 0.0;
  SummaryStats stats;

  nlohmann::json summary_json() const;
};
/// |R| = ceil(n/2 + alpha sqrt(n(1-p)/p)).
std::uint32_t proposition_red_size(std::uint32_t n, double p, double alpha);
PropositionResult run_proposition_experiment(const ExperimentConfig& config, unsigned workers = 1);

// --- swing sets -----------------------------------------------------------------

struct SwingParams {
  std::uint32_t m = 0;
  std::uint32_t x = 0;
  double p = 0.5;

  std::uint32_t vertex_count() const noexcept { return 2 * m + x; }
  double swing_sigma() const noexcept;            // sqrt(2 m p (1-p))
  double prediction() const noexcept;             // |V| x p / (sigma sqrt(2 pi))
  double error_scale() const noexcept;            // |V| (1 + x p)^2 / sigma^2
  double precondition_ratio() const noexcept;     // (1 + x p) / sigma, should be small
  /// Exact E|T_R u T_B| from binomial sums.
  double exact_expectation() const;
};

/// |T_R u T_B| on one graph. Vertices [0, m) form R, [m, 2m) B, [2m, 2m + x) X.
std::uint32_t swing_set_size(const EdgeOracle& oracle, const SwingParams& params);

struct SwingResult {
  SwingParams params;
  std::vector<double> sizes;
  SummaryStats stats;
  double prediction = 0.0;
  double exact_expectation = 0.0;
  double error_scale = 0.0;
  double precondition_ratio = 0.0;
  double relative_error = 0.0;  // |mean - prediction| / prediction

  nlohmann::json summary_json() const;
};
SwingResult run_swing_experiment(const ExperimentConfig& config, unsigned workers = 1);

// --- leader monotonicity scan -----------------------------------------------------

struct LeaderCheck {
  std::optional<Color> leader;  // majority after step 1; empty on a tie
  bool strict_violation = false;
  bool weak_violation = false;
};
/// Checks that the step-1 leader gains vertices at every later step until it
/// is unanimous. A run that never becomes unanimous for the leader violates
/// both forms; trivially monotone when unanimity comes at step 0 or 1.
LeaderCheck check_leader_monotone(const Trajectory& trajectory, std::uint32_t n);

struct ConjectureResult {
  std::uint64_t trials = 0;
  std::uint64_t strict_violations = 0;
  std::uint64_t weak_violations = 0;
  std::uint64_t leader_ties = 0;      // no leader after step 1; not counted as violations
  std::uint64_t non_unanimous = 0;
  std::uint64_t leader_lost = 0;      // unanimous for the other colour
  double strict_violation_rate = 0.0;
  double weak_violation_rate = 0.0;
  std::vector<std::uint64_t> violation_trials;  // first few strict violations
  std::vector<std::uint64_t> violation_seeds;
  std::vector<double> flags;  // 0 ok, 1 weak-only violation, 2 strict and weak, -1 leader tie

  nlohmann::json summary_json() const;
};
ConjectureResult run_conjecture_scan(const ExperimentConfig& config, unsigned workers = 1);

// --- steps to unanimity from a random colouring --------------------------------------

struct StepsTrial {
  std::uint32_t r0 = 0;
  Color majority = Color::Red;
  Outcome outcome = Outcome::StepCap;
  int steps = 0;
  int redraws = 0;
  bool success = false;
};

struct StepsResult {
  std::uint32_t n = 0;
  double p = 0.0;
  int horizon = 4;
  std::vector<StepsTrial> per_trial;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double ci95 = 0.0;
  std::uint64_t wrong_winner = 0;
  std::uint64_t not_unanimous = 0;
  std::vector<std::uint64_t> steps_histogram;  // majority-unanimous runs by step count

  nlohmann::json summary_json() const;
};
/// Initial size of R_0 for a trial: number of heads in n fair coins, redrawn
/// on an exact tie.
std::pair<std::uint32_t, int> random_initial_red(std::uint32_t n, std::uint64_t seed);
StepsResult run_steps_experiment(const ExperimentConfig& config, unsigned workers = 1);

/// Runs config.kind and packages the record.
ExperimentRecord run_experiment(const ExperimentConfig& config, unsigned workers = 1);

}  // namespace majdyn
