#include "majdyn/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "majdyn/numerics.hpp"
#include "majdyn/summation.hpp"
#include "majdyn/trial_pool.hpp"

namespace majdyn {

unsigned resolve_workers(std::optional<unsigned> requested) {
  if (requested) {
    if (*requested == 0) throw std::invalid_argument("--workers must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv("MAJDYN_WORKERS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0 || v > 4096) {
      throw std::invalid_argument("MAJDYN_WORKERS must be a positive integer");
    }
    return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

constexpr const char* kKindNames[] = {"clt",   "fixation",        "proposition",
                                      "swing", "conjecture_scan", "steps"};

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_dense_size(std::uint32_t n) {
  require(n <= kDenseCap, "n=" + std::to_string(n) + " exceeds the dense cap of " +
                              std::to_string(kDenseCap));
}

std::uint64_t graph_seed(const ExperimentConfig& c, std::uint64_t trial) {
  return trial_seed(c, trial);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  return kKindNames[static_cast<int>(kind)];
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (name == kKindNames[i]) return static_cast<ExperimentKind>(i);
  }
  throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::uint64_t trial) noexcept {
  return derive_seed(config.master_seed, trial);
}

// --- config -------------------------------------------------------------------

void ExperimentConfig::validate() const {
  require(trials >= 1, "trials must be at least 1");
  require(p > 0.0 && p < 1.0, "p must lie in (0,1)");
  require(max_steps >= 1, "max_steps must be at least 1");
  switch (kind) {
    case ExperimentKind::Clt:
      require(r0 + b0 >= 2, "clt needs r0 + b0 >= 2");
      break;
    case ExperimentKind::Fixation:
      require(n >= 1, "fixation needs n >= 1");
      require(delta <= n, "delta must not exceed n");
      require((n - delta) % 2 == 0, "n - delta must be even");
      require_dense_size(n);
      break;
    case ExperimentKind::Proposition:
      require(n >= 1, "proposition needs n >= 1");
      require(std::isfinite(alpha), "alpha must be finite");
      require(delta_frac >= 0.0, "delta_frac must be nonnegative");
      require(proposition_red_size(n, p, alpha) <= n, "|R| exceeds n; lower alpha");
      break;
    case ExperimentKind::Swing:
      require(m >= 1, "swing needs m >= 1");
      require(2ULL * m + x <= 0xffffffffULL, "swing vertex count too large");
      break;
    case ExperimentKind::ConjectureScan:
      require(r0 + b0 >= 1, "conjecture scan needs r0 + b0 >= 1");
      if (representation == Representation::Dense) require_dense_size(r0 + b0);
      break;
    case ExperimentKind::Steps:
      require(n >= 1, "steps experiment needs n >= 1");
      require(step_horizon >= 0, "step horizon must be nonnegative");
      if (representation == Representation::Dense) require_dense_size(n);
      break;
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"kind", std::string(to_string(kind))},
                   {"p", p},
                   {"trials", trials},
                   {"seed", master_seed}};
  switch (kind) {
    case ExperimentKind::Clt:
      j["r0"] = r0;
      j["b0"] = b0;
      break;
    case ExperimentKind::Fixation:
      j["n"] = n;
      j["delta"] = delta;
      j["max_steps"] = max_steps;
      j["traces"] = traces;
      break;
    case ExperimentKind::Proposition:
      j["n"] = n;
      j["alpha"] = alpha;
      j["delta_frac"] = delta_frac;
      break;
    case ExperimentKind::Swing:
      j["m"] = m;
      j["x"] = x;
      break;
    case ExperimentKind::ConjectureScan:
      j["r0"] = r0;
      j["b0"] = b0;
      j["max_steps"] = max_steps;
      j["representation"] = representation == Representation::Dense ? "dense" : "implicit";
      break;
    case ExperimentKind::Steps:
      j["n"] = n;
      j["max_steps"] = max_steps;
      j["step_horizon"] = step_horizon;
      j["representation"] = representation == Representation::Dense ? "dense" : "implicit";
      break;
  }
  return j;
}

void ExperimentConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    if (j.contains("kind")) kind = parse_experiment_kind(j.at("kind").get<std::string>());
    auto read = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    read("n", n);
    read("p", p);
    read("r0", r0);
    read("b0", b0);
    read("delta", delta);
    read("trials", trials);
    read("seed", master_seed);
    read("max_steps", max_steps);
    read("alpha", alpha);
    read("delta_frac", delta_frac);
    read("m", m);
    read("x", x);
    read("step_horizon", step_horizon);
    read("traces", traces);
    read("out", output_path);
    if (j.contains("representation")) {
      const auto r = j.at("representation").get<std::string>();
      if (r == "dense") {
        representation = Representation::Dense;
      } else if (r == "implicit") {
        representation = Representation::Implicit;
      } else {
        throw std::invalid_argument("representation must be dense or implicit");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
}

// --- record -------------------------------------------------------------------

nlohmann::json ExperimentRecord::to_json() const {
  nlohmann::json seeds{{"master", config.master_seed},
                       {"derivation", "derive_seed(master, trial)"},
                       {"first_trial", trial_seed(config, 0)}};
  return nlohmann::json{{"config", config.to_json()},
                        {"seeds", std::move(seeds)},
                        {"summary", summary},
                        {"sample_name", sample_name},
                        {"samples", samples}};
}

void ExperimentRecord::write_samples_csv(std::ostream& out) const {
  out << "trial,value\n";
  char buf[40];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = samples[i];
    if (v == std::trunc(v) && std::abs(v) < 9.0e15) {
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", v);
    }
    out << i << ',' << buf << '\n';
  }
}

// --- CLT ----------------------------------------------------------------------

nlohmann::json CltResult::summary_json() const {
  nlohmann::json j{{"predictions", predictions.to_json()}, {"stats", stats.to_json()}};
  j["variance_ratio"] = variance_ratio ? nlohmann::json(*variance_ratio) : nlohmann::json();
  j["ks"] = ks ? nlohmann::json(*ks) : nlohmann::json();
  j["variance_defined"] = stats.variance.has_value();
  j["tail_constant"] = tail_constant ? nlohmann::json(*tail_constant) : nlohmann::json();
  return j;
}

CltResult run_clt_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  CltResult out;
  out.params = ModelParams{config.r0, config.b0, config.p};
  out.params.validate();
  out.predictions = predict(out.params);
  const std::uint32_t n = config.r0 + config.b0;
  const Coloring initial = Coloring::canonical(n, config.r0);

  out.red_counts = run_trials<double>(config.trials, workers, [&](std::uint64_t i) {
    const GraphSpec spec{n, config.p, graph_seed(config, i), Representation::Implicit};
    return static_cast<double>(red_count_after_one_step(spec, initial));
  });
  out.stats = summarize(out.red_counts);
  if (out.stats.variance && out.predictions.var_pred > 0.0) {
    out.variance_ratio = *out.stats.variance / out.predictions.var_pred;
  }
  if (out.red_counts.size() >= 2 && out.predictions.var_pred > 0.0) {
    const auto z = clt_standardize(out.red_counts, out.params, out.stats.mean);
    out.ks = ks_statistic(z);
    out.stats.ks_statistic = out.ks;
  }

  // Empirical calibration of the tail constant: P(|R_1| < threshold(t)) <= c p q / t^2.
  double worst = 0.0;
  const double pq = config.p * (1.0 - config.p);
  for (double t : {1.0, 2.0, 3.0, 4.0}) {
    const double thr = tail_bound(out.params, t).threshold;
    const auto below = std::count_if(out.red_counts.begin(), out.red_counts.end(),
                                     [&](double r) { return r < thr; });
    const double frac = static_cast<double>(below) / static_cast<double>(out.red_counts.size());
    worst = std::max(worst, frac * t * t / pq);
  }
  out.tail_constant = worst;
  return out;
}

// --- fixation -----------------------------------------------------------------

char to_char(Winner w) noexcept {
  switch (w) {
    case Winner::Red: return 'R';
    case Winner::Blue: return 'B';
    case Winner::Tie: return 'T';
  }
  return '?';
}

Winner winner_of(Outcome outcome) noexcept {
  if (outcome == Outcome::UnanimousRed) return Winner::Red;
  if (outcome == Outcome::UnanimousBlue) return Winner::Blue;
  return Winner::Tie;
}

namespace {

nlohmann::json histogram_json(const std::vector<std::uint64_t>& h) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t s = 0; s < h.size(); ++s) {
    if (h[s] != 0) j.push_back({{"steps", s}, {"count", h[s]}});
  }
  return j;
}

void bump(std::vector<std::uint64_t>& h, int steps) {
  const auto s = static_cast<std::size_t>(steps);
  if (h.size() <= s) h.resize(s + 1, 0);
  ++h[s];
}

}  // namespace

nlohmann::json FixationResult::summary_json() const {
  std::string wr;
  std::string wb;
  nlohmann::json traces = nlohmann::json::array();
  for (std::size_t i = 0; i < per_trial.size(); ++i) {
    const auto& t = per_trial[i];
    wr.push_back(to_char(t.with_x_red));
    wb.push_back(to_char(t.with_x_blue));
    if (!t.trace_x_red.empty()) {
      traces.push_back({{"trial", i}, {"x_red", t.trace_x_red}, {"x_blue", t.trace_x_blue}});
    }
  }
  return nlohmann::json{{"n", n},
                        {"m", m},
                        {"delta", delta},
                        {"p", p},
                        {"trials", trials},
                        {"red_wins", red_wins},
                        {"blue_wins", blue_wins},
                        {"ties", ties},
                        {"p_red", p_red},
                        {"p_blue", p_blue},
                        {"advantage", advantage},
                        {"advantage_se", advantage_se},
                        {"z_score", z_score},
                        {"asymptotic_bound", asymptotic_bound},
                        {"p_both_own", trials ? static_cast<double>(both_own) / trials : 0.0},
                        {"coupling_violations", coupling_violations},
                        {"domination_violations", domination_violations},
                        {"unanimous_within_four_steps", unanimous_within_four},
                        {"steps_histogram", histogram_json(steps_histogram)},
                        {"winners_x_red", wr},
                        {"winners_x_blue", wb},
                        {"traces", std::move(traces)}};
}

FixationResult run_fixation_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  FixationResult out;
  out.n = config.n;
  out.delta = config.delta;
  out.m = (config.n - config.delta) / 2;
  out.p = config.p;
  out.trials = config.trials;
  // R_0 = [0, m), X = [m, m + delta), B_0 = [m + delta, n).
  const Coloring x_red = Coloring::canonical(config.n, out.m + config.delta);
  const Coloring x_blue = Coloring::canonical(config.n, out.m);

  out.per_trial = run_trials<FixationTrial>(config.trials, workers, [&](std::uint64_t i) {
    const GraphSpec spec{config.n, config.p, graph_seed(config, i), Representation::Dense};
    const DenseGraph g = sample_dense(spec);
    DynamicsRun<DenseGraph> run_red(g, x_red, config.max_steps);
    DynamicsRun<DenseGraph> run_blue(g, x_blue, config.max_steps);
    // Raw states keep evolving after a run stops (a two-cycle keeps cycling),
    // so domination is checked on them rather than on the frozen run state.
    Coloring a = x_red;
    Coloring b = x_blue;
    FixationTrial t;
    t.domination_held = a.dominates(b);
    while (!run_red.done() || !run_blue.done()) {
      run_red.step();
      run_blue.step();
      a = majority_step(g, a);
      b = majority_step(g, b);
      t.domination_held = t.domination_held && a.dominates(b);
    }
    t.with_x_red = winner_of(run_red.trajectory().outcome);
    t.with_x_blue = winner_of(run_blue.trajectory().outcome);
    t.steps_x_red = run_red.trajectory().steps_to_outcome;
    t.steps_x_blue = run_blue.trajectory().steps_to_outcome;
    if (i < config.traces) {
      t.trace_x_red = run_red.trajectory().red_counts;
      t.trace_x_blue = run_blue.trajectory().red_counts;
    }
    return t;
  });

  std::uint64_t within_four = 0;
  for (const auto& t : out.per_trial) {
    out.red_wins += t.with_x_red == Winner::Red;
    out.blue_wins += t.with_x_red == Winner::Blue;
    out.ties += t.with_x_red == Winner::Tie;
    out.both_own += t.with_x_red == Winner::Red && t.with_x_blue == Winner::Blue;
    out.coupling_violations += t.with_x_red == Winner::Blue && t.with_x_blue == Winner::Red;
    out.domination_violations += !t.domination_held;
    within_four += t.with_x_red != Winner::Tie && t.steps_x_red <= 4;
    bump(out.steps_histogram, t.steps_x_red);
  }
  const auto trials = static_cast<double>(out.trials);
  out.p_red = static_cast<double>(out.red_wins) / trials;
  out.p_blue = static_cast<double>(out.blue_wins) / trials;
  out.advantage = out.p_red - out.p_blue;
  // Var of the per-trial score (+1, -1, 0) divided by T.
  const double second = out.p_red + out.p_blue;
  out.advantage_se = std::sqrt(std::max(0.0, second - out.advantage * out.advantage) / trials);
  out.z_score = out.advantage_se > 0.0 ? out.advantage / out.advantage_se
                : out.advantage > 0.0   ? std::numeric_limits<double>::infinity()
                                        : 0.0;
  out.asymptotic_bound = fixation_advantage_bound(config.delta);
  out.unanimous_within_four = static_cast<double>(within_four) / trials;
  return out;
}

// --- proposition ----------------------------------------------------------------

std::uint32_t proposition_red_size(std::uint32_t n, double p, double alpha) {
  const double target = n / 2.0 + alpha * std::sqrt(n * (1.0 - p) / p);
  if (!(target <= static_cast<double>(n))) return n + 1;  // flagged by validate()
  return static_cast<std::uint32_t>(std::max(0.0, std::ceil(target)));
}

nlohmann::json PropositionResult::summary_json() const {
  return nlohmann::json{{"n", n},
                        {"p", p},
                        {"alpha", alpha},
                        {"delta_frac", delta_frac},
                        {"red_size", red_size},
                        {"failures", failures},
                        {"failure_rate", failure_rate},
                        {"stats", stats.to_json()}};
}

PropositionResult run_proposition_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  PropositionResult out;
  out.n = config.n;
  out.p = config.p;
  out.alpha = config.alpha;
  out.delta_frac = config.delta_frac;
  out.red_size = proposition_red_size(config.n, config.p, config.alpha);
  const Coloring red = Coloring::canonical(config.n, out.red_size);

  out.counts = run_trials<double>(config.trials, workers, [&](std::uint64_t i) {
    const EdgeOracle oracle(config.n, config.p, graph_seed(config, i));
    const auto excess = red_excess(oracle, red);
    return static_cast<double>(std::count_if(excess.begin(), excess.end(),
                                             [](std::int64_t e) { return e <= 0; }));
  });
  const double limit = config.delta_frac * config.n;
  for (double c : out.counts) out.failures += c > limit;
  out.failure_rate = static_cast<double>(out.failures) / static_cast<double>(config.trials);
  out.stats = summarize(out.counts);
  return out;
}

// --- swing ----------------------------------------------------------------------

double SwingParams::swing_sigma() const noexcept { return std::sqrt(2.0 * m * p * (1.0 - p)); }

double SwingParams::prediction() const noexcept {
  return vertex_count() * static_cast<double>(x) * p /
         (swing_sigma() * std::sqrt(2.0 * std::numbers::pi));
}

double SwingParams::error_scale() const noexcept {
  const double s = swing_sigma();
  const double lead = 1.0 + x * p;
  return vertex_count() * lead * lead / (s * s);
}

double SwingParams::precondition_ratio() const noexcept {
  return (1.0 + x * p) / swing_sigma();
}

double SwingParams::exact_expectation() const {
  if (m == 0) throw std::invalid_argument("swing needs m >= 1");
  if (x == 0) return 0.0;
  // For v in R: d_B - d_R ~ Bin(m) - Bin(m-1) =: W; for v in B it is -W.
  const DiffDistribution w = diff_distribution(m, m - 1, p);
  CompensatedSum total;
  for (std::int64_t k = 1; k <= x; ++k) {
    const double pk = std::exp(log_binomial_pmf(x, p, k));
    const double red = w.cdf(k) - w.cdf(0);           // P(1 <= W <= k)
    const double blue = w.cdf(0) - w.cdf(-k);         // P(-(k-1) <= W <= 0)
    total.add(pk * (red + blue));
  }
  return static_cast<double>(m) * total.value();
}

std::uint32_t swing_set_size(const EdgeOracle& oracle, const SwingParams& params) {
  const std::uint32_t n = params.vertex_count();
  if (oracle.n() != n) throw std::invalid_argument("oracle size must be 2m + x");
  // Low 32 bits carry d_B - d_R, high bits d_X.
  std::vector<std::int64_t> weight(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    weight[v] = v < params.m ? -1 : v < 2 * params.m ? 1 : (std::int64_t{1} << 32);
  }
  std::vector<std::int64_t> acc(n, 0);
  accumulate_neighbor_weights(oracle, weight, acc);
  std::uint32_t count = 0;
  for (std::uint32_t v = 0; v < 2 * params.m; ++v) {
    const auto diff = static_cast<std::int64_t>(static_cast<std::int32_t>(
        static_cast<std::uint32_t>(static_cast<std::uint64_t>(acc[v]))));
    const std::int64_t dx = (acc[v] - diff) >> 32;
    if (v < params.m) {
      count += 0 < diff && diff <= dx;
    } else {
      count += 0 <= diff && diff < dx;
    }
  }
  return count;
}

nlohmann::json SwingResult::summary_json() const {
  return nlohmann::json{{"m", params.m},
                        {"x", params.x},
                        {"p", params.p},
                        {"swing_sigma", params.swing_sigma()},
                        {"stats", stats.to_json()},
                        {"prediction", prediction},
                        {"exact_expectation", exact_expectation},
                        {"relative_error", relative_error},
                        {"error_scale", error_scale},
                        {"precondition_ratio", precondition_ratio}};
}

SwingResult run_swing_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  SwingResult out;
  out.params = SwingParams{config.m, config.x, config.p};
  const std::uint32_t n = out.params.vertex_count();
  out.sizes = run_trials<double>(config.trials, workers, [&](std::uint64_t i) {
    const EdgeOracle oracle(n, config.p, graph_seed(config, i));
    return static_cast<double>(swing_set_size(oracle, out.params));
  });
  out.stats = summarize(out.sizes);
  out.prediction = out.params.prediction();
  out.exact_expectation = out.params.exact_expectation();
  out.error_scale = out.params.error_scale();
  out.precondition_ratio = out.params.precondition_ratio();
  out.relative_error =
      out.prediction > 0.0 ? std::abs(out.stats.mean - out.prediction) / out.prediction : 0.0;
  return out;
}

// --- leader monotonicity ------------------------------------------------------

LeaderCheck check_leader_monotone(const Trajectory& trajectory, std::uint32_t n) {
  LeaderCheck out;
  const auto& counts = trajectory.red_counts;
  if (counts.size() < 2) {
    // Unanimous at step 0 (or a one-entry trajectory): nothing to check.
    if (trajectory.outcome == Outcome::UnanimousRed) out.leader = Color::Red;
    if (trajectory.outcome == Outcome::UnanimousBlue) out.leader = Color::Blue;
    if (!out.leader) out.strict_violation = out.weak_violation = true;
    return out;
  }
  const std::uint64_t twice = 2ULL * counts[1];
  if (twice == n) return out;  // no leader
  const Color leader = twice > n ? Color::Red : Color::Blue;
  out.leader = leader;
  auto lead_count = [&](std::uint32_t red) { return leader == Color::Red ? red : n - red; };
  const Outcome wanted = leader == Color::Red ? Outcome::UnanimousRed : Outcome::UnanimousBlue;
  if (trajectory.outcome != wanted) {
    out.strict_violation = out.weak_violation = true;
    return out;
  }
  for (std::size_t i = 1; i + 1 < counts.size(); ++i) {
    const std::uint32_t a = lead_count(counts[i]);
    const std::uint32_t b = lead_count(counts[i + 1]);
    if (b <= a) out.strict_violation = true;
    if (b < a) out.weak_violation = true;
  }
  return out;
}

nlohmann::json ConjectureResult::summary_json() const {
  return nlohmann::json{{"trials", trials},
                        {"strict_violations", strict_violations},
                        {"weak_violations", weak_violations},
                        {"strict_violation_rate", strict_violation_rate},
                        {"weak_violation_rate", weak_violation_rate},
                        {"leader_ties", leader_ties},
                        {"non_unanimous", non_unanimous},
                        {"leader_lost", leader_lost},
                        {"violation_trials", violation_trials},
                        {"violation_seeds", violation_seeds}};
}

ConjectureResult run_conjecture_scan(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const std::uint32_t n = config.r0 + config.b0;
  const Coloring initial = Coloring::canonical(n, config.r0);
  struct Row {
    LeaderCheck check;
    Outcome outcome = Outcome::StepCap;
  };
  const auto rows = run_trials<Row>(config.trials, workers, [&](std::uint64_t i) {
    const GraphSpec spec{n, config.p, graph_seed(config, i), config.representation};
    const Trajectory t = run_dynamics(spec, initial, config.max_steps);
    return Row{check_leader_monotone(t, n), t.outcome};
  });

  ConjectureResult out;
  out.trials = config.trials;
  constexpr std::size_t kExamples = 10;
  for (std::uint64_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool unanimous =
        r.outcome == Outcome::UnanimousRed || r.outcome == Outcome::UnanimousBlue;
    out.non_unanimous += !unanimous;
    if (!r.check.leader) {
      ++out.leader_ties;
      out.flags.push_back(-1.0);
      continue;
    }
    const Outcome wanted =
        *r.check.leader == Color::Red ? Outcome::UnanimousRed : Outcome::UnanimousBlue;
    out.leader_lost += unanimous && r.outcome != wanted;
    out.strict_violations += r.check.strict_violation;
    out.weak_violations += r.check.weak_violation;
    out.flags.push_back(r.check.weak_violation ? 2.0 : r.check.strict_violation ? 1.0 : 0.0);
    if (r.check.strict_violation && out.violation_trials.size() < kExamples) {
      out.violation_trials.push_back(i);
      out.violation_seeds.push_back(graph_seed(config, i));
    }
  }
  out.strict_violation_rate = static_cast<double>(out.strict_violations) / out.trials;
  out.weak_violation_rate = static_cast<double>(out.weak_violations) / out.trials;
  return out;
}

// --- steps ------------------------------------------------------------------------

std::pair<std::uint32_t, int> random_initial_red(std::uint32_t n, std::uint64_t seed) {
  std::uint64_t state = mix64(seed ^ 0x3c6ef372fe94f82bULL);
  for (int redraws = 0;; ++redraws) {
    std::uint32_t heads = 0;
    for (std::uint32_t done = 0; done < n; done += 64) {
      state += kGolden;
      std::uint64_t word = mix64(state);
      const std::uint32_t take = std::min<std::uint32_t>(64, n - done);
      if (take < 64) word &= (1ULL << take) - 1;
      heads += static_cast<std::uint32_t>(std::popcount(word));
    }
    if (2ULL * heads != n) return {heads, redraws};
  }
}

nlohmann::json StepsResult::summary_json() const {
  std::vector<std::uint64_t> outcomes(5, 0);
  for (const auto& t : per_trial) ++outcomes[static_cast<int>(t.outcome)];
  nlohmann::json by_outcome;
  for (int o = 0; o < 5; ++o) by_outcome[std::string(to_string(static_cast<Outcome>(o)))] = outcomes[o];
  // Per-step breakdown: cumulative share of trials unanimous for the majority.
  nlohmann::json breakdown = nlohmann::json::array();
  std::uint64_t running = 0;
  for (std::size_t s = 0; s < steps_histogram.size(); ++s) {
    running += steps_histogram[s];
    breakdown.push_back({{"steps", s},
                         {"count", steps_histogram[s]},
                         {"cumulative_fraction",
                          static_cast<double>(running) / static_cast<double>(per_trial.size())}});
  }
  return nlohmann::json{{"n", n},
                        {"p", p},
                        {"horizon", horizon},
                        {"trials", per_trial.size()},
                        {"successes", successes},
                        {"success_rate", success_rate},
                        {"ci95", ci95},
                        {"wrong_winner", wrong_winner},
                        {"not_unanimous", not_unanimous},
                        {"outcomes", std::move(by_outcome)},
                        {"steps_breakdown", std::move(breakdown)}};
}

StepsResult run_steps_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  StepsResult out;
  out.n = config.n;
  out.p = config.p;
  out.horizon = config.step_horizon;
  out.per_trial = run_trials<StepsTrial>(config.trials, workers, [&](std::uint64_t i) {
    const std::uint64_t seed = graph_seed(config, i);
    StepsTrial t;
    std::tie(t.r0, t.redraws) = random_initial_red(config.n, derive_seed(seed, 0));
    t.majority = 2ULL * t.r0 > config.n ? Color::Red : Color::Blue;
    const GraphSpec spec{config.n, config.p, seed, config.representation};
    const Trajectory traj = run_dynamics(spec, Coloring::canonical(config.n, t.r0), config.max_steps);
    t.outcome = traj.outcome;
    t.steps = traj.steps_to_outcome;
    const Outcome wanted = t.majority == Color::Red ? Outcome::UnanimousRed : Outcome::UnanimousBlue;
    t.success = t.outcome == wanted && t.steps <= config.step_horizon;
    return t;
  });
  for (const auto& t : out.per_trial) {
    out.successes += t.success;
    const Outcome wanted = t.majority == Color::Red ? Outcome::UnanimousRed : Outcome::UnanimousBlue;
    const bool unanimous = t.outcome == Outcome::UnanimousRed || t.outcome == Outcome::UnanimousBlue;
    out.not_unanimous += !unanimous;
    out.wrong_winner += unanimous && t.outcome != wanted;
    if (t.outcome == wanted) bump(out.steps_histogram, t.steps);
  }
  out.success_rate = static_cast<double>(out.successes) / static_cast<double>(config.trials);
  out.ci95 = proportion_ci95(out.success_rate, config.trials);
  return out;
}

// --- dispatch -----------------------------------------------------------------------

ExperimentRecord run_experiment(const ExperimentConfig& config, unsigned workers) {
  ExperimentRecord rec;
  rec.config = config;
  switch (config.kind) {
    case ExperimentKind::Clt: {
      auto r = run_clt_experiment(config, workers);
      rec.summary = r.summary_json();
      rec.sample_name = "red_count_after_one_step";
      rec.samples = std::move(r.red_counts);
      break;
    }
    case ExperimentKind::Fixation: {
      auto r = run_fixation_experiment(config, workers);
      rec.summary = r.summary_json();
      rec.sample_name = "winner_with_x_red (1 red, -1 blue, 0 tie)";
      for (const auto& t : r.per_trial) {
        rec.samples.push_back(t.with_x_red == Winner::Red ? 1.0 : t.with_x_red == Winner::Blue ? -1.0 : 0.0);
      }
      break;
    }
    case ExperimentKind::Proposition: {
      auto r = run_proposition_experiment(config, workers);
      rec.summary = r.summary_json();
      rec.sample_name = "opposing_majority_count";
      rec.samples = std::move(r.counts);
      break;
    }
    case ExperimentKind::Swing: {
      auto r = run_swing_experiment(config, workers);
      rec.summary = r.summary_json();
      rec.sample_name = "swing_set_size";
      rec.samples = std::move(r.sizes);
      break;
    }
    case ExperimentKind::ConjectureScan: {
      auto r = run_conjecture_scan(config, workers);
      rec.summary = r.summary_json();
      rec.sample_name = "violation (0 none, 1 strict only, 2 strict and weak, -1 no leader)";
      rec.samples = std::move(r.flags);
      break;
    }
    case ExperimentKind::Steps: {
      auto r = run_steps_experiment(config, workers);
      rec.summary = r.summary_json();
      rec.sample_name = "steps_to_outcome (negative when not a majority win)";
      for (const auto& t : r.per_trial) {
        const Outcome wanted = t.majority == Color::Red ? Outcome::UnanimousRed : Outcome::UnanimousBlue;
        rec.samples.push_back(t.outcome == wanted ? t.steps : -1.0 - t.steps);
      }
      break;
    }
  }
  return rec;
}

}  // namespace majdyn
