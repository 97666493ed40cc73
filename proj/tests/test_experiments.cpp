#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "majdyn/experiments.hpp"
#include "majdyn/numerics.hpp"
#include "majdyn/trial_pool.hpp"

using namespace majdyn;

namespace {

ExperimentConfig config_of(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  return c;
}

// P(v red after one step | edge uv = e) pieces, from exact binomial laws.
// Returns {P(v red), f(1) - f(0)} where f(e) conditions on the edge to a
// neighbour of colour `other_red`.
struct OneStep {
  double p_red;
  double slope;
};

OneStep one_step_law(std::int64_t r0, std::int64_t b0, double p, bool v_red, bool other_red) {
  // Neighbours other than v and the distinguished vertex u.
  const std::int64_t reds = r0 - (v_red ? 1 : 0) - (other_red ? 1 : 0);
  const std::int64_t blues = b0 - (v_red ? 0 : 1) - (other_red ? 0 : 1);
  const auto w = diff_distribution(reds, blues, p);  // d_R - d_B over the rest
  // v red afterwards iff excess > 0, or excess == 0 and v was red.
  auto red_given = [&](std::int64_t shift) {
    return v_red ? w.survival(-shift) : w.survival(1 - shift);
  };
  const double with_edge = red_given(other_red ? 1 : -1);
  const double without = red_given(0);
  return {p * with_edge + (1 - p) * without, with_edge - without};
}

// Exact E|R_1| and Var|R_1|: vertices interact only through their shared edge.
std::pair<double, double> exact_one_step_moments(std::int64_t r0, std::int64_t b0, double p) {
  const double pq = p * (1 - p);
  // P(v red) does not depend on which other vertex is singled out.
  const double pr = one_step_law(r0, b0, p, true, r0 >= 2).p_red;
  const double pb = one_step_law(r0, b0, p, false, r0 >= 1).p_red;
  double mean = r0 * pr + b0 * pb;
  double var = r0 * pr * (1 - pr) + b0 * pb * (1 - pb);
  // Ordered pairs (u, v), u != v: Cov = pq * slope_u(v) * slope_v(u).
  const double rr = r0 >= 2 ? one_step_law(r0, b0, p, true, true).slope : 0.0;
  const double bb = b0 >= 2 ? one_step_law(r0, b0, p, false, false).slope : 0.0;
  const double rb = one_step_law(r0, b0, p, true, false).slope;
  const double br = one_step_law(r0, b0, p, false, true).slope;
  var += pq * (double(r0) * (r0 - 1) * rr * rr + double(b0) * (b0 - 1) * bb * bb +
               2.0 * r0 * b0 * rb * br);
  return {mean, var};
}

}  // namespace

TEST_CASE("trial pool keeps trial order and propagates errors") {
  const auto a = run_trials<std::uint64_t>(1000, 1, [](std::uint64_t i) { return i * i; });
  const auto b = run_trials<std::uint64_t>(1000, 7, [](std::uint64_t i) { return i * i; });
  CHECK(a == b);
  CHECK(a[999] == 999ULL * 999);
  CHECK_THROWS_AS(run_trials<int>(50, 3,
                                  [](std::uint64_t i) -> int {
                                    if (i == 17) throw std::runtime_error("boom");
                                    return 0;
                                  }),
                  std::runtime_error);
  CHECK(resolve_workers(3) == 3);
  CHECK_THROWS_AS(resolve_workers(0), std::invalid_argument);
}

TEST_CASE("trial seeds are a keyed function of master seed and index") {
  ExperimentConfig c;
  c.master_seed = 5;
  CHECK(trial_seed(c, 0) != trial_seed(c, 1));
  CHECK(trial_seed(c, 3) == derive_seed(5, 3));
  ExperimentConfig d = c;
  d.master_seed = 6;
  CHECK(trial_seed(c, 0) != trial_seed(d, 0));
}

TEST_CASE("exact one-step variance oracle reproduces tiny-model enumeration logic") {
  // Exact moments against a Monte Carlo run at moderate n.
  ExperimentConfig c = config_of(ExperimentKind::Clt);
  c.r0 = 110;
  c.b0 = 90;
  c.p = 0.3;
  c.trials = 4000;
  c.master_seed = 17;
  const auto r = run_clt_experiment(c, resolve_workers(std::nullopt));
  const auto [mean, var] = exact_one_step_moments(110, 90, 0.3);
  CHECK(std::fabs(r.stats.mean - mean) <= 4 * std::sqrt(var / 4000));
  CHECK(*r.stats.variance / var == doctest::Approx(1.0).epsilon(0.09));
}

TEST_CASE("exact variance at n = 2000 sits inside the acceptance band") {
  const auto [mean, var] = exact_one_step_moments(1000, 1000, 0.5);
  CHECK(mean == doctest::Approx(1000.0));
  const double ratio = var / variance_prediction({1000, 1000, 0.5}).var_pred;
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("clt experiment edge cases") {
  ExperimentConfig c = config_of(ExperimentKind::Clt);
  c.r0 = 30;
  c.b0 = 30;
  c.trials = 1;
  const auto one = run_clt_experiment(c);
  CHECK_FALSE(one.stats.variance.has_value());
  CHECK_FALSE(one.variance_ratio.has_value());
  CHECK_FALSE(one.ks.has_value());
  CHECK(one.summary_json().at("variance_defined") == false);

  c.r0 = c.b0 = 1000;
  c.trials = 300;
  c.master_seed = 1;
  const auto sym = run_clt_experiment(c);
  CHECK(std::fabs(sym.stats.mean / 2000 - 0.5) <= 0.01);
  CHECK(sym.tail_constant.has_value());

  c.r0 = 1;
  c.b0 = 0;
  CHECK_THROWS_AS(run_clt_experiment(c), std::invalid_argument);
}

TEST_CASE("confidence radii shrink like 1/sqrt(T)") {
  ExperimentConfig c = config_of(ExperimentKind::Clt);
  c.r0 = 25;
  c.b0 = 25;
  c.master_seed = 4;
  std::vector<double> radii;
  for (std::uint64_t t : {1000, 4000, 16000}) {
    c.trials = t;
    radii.push_back(*run_clt_experiment(c, resolve_workers(std::nullopt)).stats.ci95_mean);
  }
  CHECK(radii[0] / radii[1] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(radii[1] / radii[2] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("fixation experiment") {
  ExperimentConfig c = config_of(ExperimentKind::Fixation);
  c.n = 21;
  c.delta = 21;
  c.trials = 5;
  const auto all = run_fixation_experiment(c);
  CHECK(all.p_red == 1.0);
  CHECK(all.steps_histogram.size() == 1);
  CHECK(all.per_trial[0].steps_x_red == 0);

  c.n = 101;
  c.delta = 3;
  c.trials = 200;
  c.master_seed = 9;
  c.traces = 3;
  const auto r = run_fixation_experiment(c, resolve_workers(std::nullopt));
  CHECK(r.m == 49);
  CHECK(r.coupling_violations == 0);
  CHECK(r.domination_violations == 0);
  CHECK(r.red_wins + r.blue_wins + r.ties == 200);
  CHECK(r.p_red >= r.p_blue);
  CHECK(r.per_trial[2].trace_x_red.size() >= 1);
  CHECK(r.per_trial[3].trace_x_red.empty());
  // The X-red run starts with m + delta red vertices.
  CHECK(r.per_trial[0].trace_x_red[0] == 52);
  CHECK(r.per_trial[0].trace_x_blue[0] == 49);
  CHECK(r.summary_json().at("winners_x_red").get<std::string>().size() == 200);
  CHECK(r.asymptotic_bound == doctest::Approx(fixation_advantage_bound(3)));

  c.delta = 4;
  CHECK_THROWS_AS(run_fixation_experiment(c), std::invalid_argument);
  c.delta = 103;
  CHECK_THROWS_AS(run_fixation_experiment(c), std::invalid_argument);
}

TEST_CASE("proposition experiment") {
  CHECK(proposition_red_size(1000, 0.5, 0.85) == 527);
  ExperimentConfig c = config_of(ExperimentKind::Proposition);
  c.n = 400;
  c.p = 0.5;
  c.alpha = (400 / 2.0 - 0.5) / std::sqrt(400.0);
  c.trials = 20;
  CHECK(proposition_red_size(c.n, c.p, c.alpha) == 400);
  const auto full = run_proposition_experiment(c);
  for (double x : full.counts) CHECK(x == 0.0);

  c.alpha = 0.0;
  c.delta_frac = 1.0;
  c.trials = 10;
  CHECK(run_proposition_experiment(c).failures == 0);

  c.alpha = 0.85;
  c.delta_frac = 0.499;
  const auto r = run_proposition_experiment(c);
  CHECK(r.red_size == static_cast<std::uint32_t>(std::ceil(200 + 0.85 * 20)));
  CHECK(r.failures == 0);

  c.alpha = 50;
  CHECK_THROWS_AS(run_proposition_experiment(c), std::invalid_argument);
}

TEST_CASE("swing set size matches a direct count") {
  const SwingParams sp{30, 4, 0.4};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EdgeOracle o(sp.vertex_count(), sp.p, seed);
    std::uint32_t expect = 0;
    for (std::uint32_t v = 0; v < 60; ++v) {
      int dr = 0;
      int db = 0;
      int dx = 0;
      for (std::uint32_t u = 0; u < sp.vertex_count(); ++u) {
        if (u == v || !o.present(u, v)) continue;
        (u < 30 ? dr : u < 60 ? db : dx) += 1;
      }
      const int diff = db - dr;
      expect += v < 30 ? (0 < diff && diff <= dx) : (0 <= diff && diff < dx);
    }
    CHECK(swing_set_size(o, sp) == expect);
  }
}

TEST_CASE("swing experiment") {
  CHECK(SwingParams{1000, 1, 0.5}.prediction() == doctest::Approx(17.84).epsilon(1e-3));
  CHECK(SwingParams{1000, 1, 0.5}.swing_sigma() == doctest::Approx(std::sqrt(500.0)));
  CHECK(SwingParams{1000, 0, 0.5}.exact_expectation() == 0.0);

  ExperimentConfig c = config_of(ExperimentKind::Swing);
  c.m = 80;
  c.x = 0;
  c.trials = 10;
  for (double s : run_swing_experiment(c).sizes) CHECK(s == 0.0);

  c.m = 100;
  c.x = 3;
  c.p = 0.5;
  c.trials = 3000;
  c.master_seed = 12;
  const auto r = run_swing_experiment(c, resolve_workers(std::nullopt));
  const double sd = std::sqrt(*r.stats.variance / 3000);
  CHECK(std::fabs(r.stats.mean - r.exact_expectation) <= 4 * sd);
  CHECK(r.precondition_ratio == doctest::Approx(2.5 / std::sqrt(50.0)));
}

TEST_CASE("leader monotonicity classification") {
  auto traj = [](std::vector<std::uint32_t> counts, Outcome o) {
    Trajectory t;
    t.red_counts = std::move(counts);
    t.outcome = o;
    t.steps_to_outcome = static_cast<int>(t.red_counts.size()) - 1;
    return t;
  };
  auto ok = check_leader_monotone(traj({4, 10}, Outcome::UnanimousRed), 10);
  CHECK(ok.leader == Color::Red);
  CHECK_FALSE(ok.strict_violation);
  CHECK_FALSE(ok.weak_violation);

  auto tie_step = check_leader_monotone(traj({4, 6, 6, 10}, Outcome::UnanimousRed), 10);
  CHECK(tie_step.strict_violation);
  CHECK_FALSE(tie_step.weak_violation);

  auto dip = check_leader_monotone(traj({4, 7, 6, 10}, Outcome::UnanimousRed), 10);
  CHECK(dip.strict_violation);
  CHECK(dip.weak_violation);

  auto blue = check_leader_monotone(traj({6, 3, 1, 0}, Outcome::UnanimousBlue), 10);
  CHECK(blue.leader == Color::Blue);
  CHECK_FALSE(blue.strict_violation);

  auto cycle = check_leader_monotone(traj({1, 1, 1}, Outcome::TwoCycle), 2);
  CHECK_FALSE(cycle.leader.has_value());  // step-1 tie: 1 of 2
  auto cycle2 = check_leader_monotone(traj({3, 4, 2, 4}, Outcome::TwoCycle), 6);
  CHECK(cycle2.strict_violation);
  CHECK(cycle2.weak_violation);

  auto lost = check_leader_monotone(traj({4, 6, 0}, Outcome::UnanimousBlue), 10);
  CHECK(lost.strict_violation);
  CHECK(lost.weak_violation);

  auto start = check_leader_monotone(traj({10}, Outcome::UnanimousRed), 10);
  CHECK_FALSE(start.strict_violation);
}

TEST_CASE("conjecture scan runs and reports") {
  ExperimentConfig c = config_of(ExperimentKind::ConjectureScan);
  c.r0 = 60;
  c.b0 = 40;
  c.p = 0.5;
  c.trials = 50;
  const auto r = run_conjecture_scan(c, resolve_workers(std::nullopt));
  CHECK(r.flags.size() == 50);
  CHECK(r.weak_violations <= r.strict_violations);
  CHECK(r.violation_trials.size() <= 10);
  CHECK(r.violation_trials.size() == r.violation_seeds.size());
  c.representation = Representation::Implicit;
  const auto ri = run_conjecture_scan(c);
  CHECK(ri.summary_json() == r.summary_json());
}

TEST_CASE("random initial colouring") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto [r, redraws] = random_initial_red(40, s);
    CHECK(r <= 40);
    CHECK(r != 20);
    CHECK(random_initial_red(40, s).first == r);
    CHECK(redraws >= 0);
    CHECK(random_initial_red(41, s).second == 0);
  }
  double mean = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) mean += random_initial_red(1001, s).first / 2000.0;
  CHECK(std::fabs(mean - 500.5) <= 4 * std::sqrt(1001 / 4.0 / 2000));
}

TEST_CASE("steps experiment") {
  ExperimentConfig c = config_of(ExperimentKind::Steps);
  c.n = 300;
  c.p = 0.5;
  c.trials = 30;
  c.master_seed = 8;
  const auto r = run_steps_experiment(c, resolve_workers(std::nullopt));
  CHECK(r.success_rate >= 0.8);
  std::uint64_t total = 0;
  for (auto h : r.steps_histogram) total += h;
  CHECK(total + r.wrong_winner + r.not_unanimous == 30);
  for (const auto& t : r.per_trial) CHECK((2 * t.r0 > 300) == (t.majority == Color::Red));
  CHECK(r.summary_json().at("steps_breakdown").is_array());
}

TEST_CASE("config validation and JSON merge") {
  ExperimentConfig c = config_of(ExperimentKind::Clt);
  c.r0 = 5;
  c.b0 = 5;
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.trials = 3;
  c.p = 1.2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  ExperimentConfig d;
  d.merge_json(nlohmann::json::parse(R"({"kind": "swing", "m": 10, "x": 2, "p": 0.25, "trials": 4, "seed": 99})"));
  CHECK(d.kind == ExperimentKind::Swing);
  CHECK(d.m == 10);
  CHECK(d.x == 2);
  CHECK(d.master_seed == 99);
  CHECK_NOTHROW(d.validate());
  CHECK_THROWS_AS(d.merge_json(nlohmann::json::parse(R"({"m": "ten"})")), std::invalid_argument);
  CHECK_THROWS_AS(d.merge_json(nlohmann::json::parse(R"({"kind": "nope"})")), std::invalid_argument);
  CHECK_THROWS_AS(d.merge_json(nlohmann::json::parse("[1]")), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_kind("x"), std::invalid_argument);
  CHECK(parse_experiment_kind(to_string(ExperimentKind::Steps)) == ExperimentKind::Steps);
}

TEST_CASE("records are identical at any worker count") {
  std::vector<ExperimentConfig> configs;
  {
    auto c = config_of(ExperimentKind::Clt);
    c.r0 = 70; c.b0 = 50; c.trials = 40; c.master_seed = 3;
    configs.push_back(c);
  }
  {
    auto c = config_of(ExperimentKind::Fixation);
    c.n = 61; c.delta = 1; c.trials = 25; c.master_seed = 3;
    configs.push_back(c);
  }
  {
    auto c = config_of(ExperimentKind::Proposition);
    c.n = 150; c.trials = 12; c.master_seed = 3;
    configs.push_back(c);
  }
  {
    auto c = config_of(ExperimentKind::Swing);
    c.m = 40; c.x = 3; c.trials = 30; c.master_seed = 3;
    configs.push_back(c);
  }
  {
    auto c = config_of(ExperimentKind::ConjectureScan);
    c.r0 = 40; c.b0 = 41; c.trials = 30; c.master_seed = 3;
    configs.push_back(c);
  }
  {
    auto c = config_of(ExperimentKind::Steps);
    c.n = 80; c.trials = 20; c.master_seed = 3;
    configs.push_back(c);
  }
  for (const auto& c : configs) {
    const auto a = run_experiment(c, 1);
    const auto b = run_experiment(c, 4);
    CHECK(a.to_json().dump() == b.to_json().dump());
    std::ostringstream ca;
    std::ostringstream cb;
    a.write_samples_csv(ca);
    b.write_samples_csv(cb);
    CHECK(ca.str() == cb.str());
    CHECK(ca.str().rfind("trial,value\n", 0) == 0);
    CHECK(a.samples.size() == c.trials);
  }
}

TEST_CASE("sample CSV formatting") {
  ExperimentRecord rec;
  rec.samples = {3.0, -1.0, 0.1};
  std::ostringstream out;
  rec.write_samples_csv(out);
  CHECK(out.str() == "trial,value\n0,3\n1,-1\n2,0.10000000000000001\n");
}
