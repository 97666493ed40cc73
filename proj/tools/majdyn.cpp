// majdyn: command-line driver for the majority-dynamics experiments.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "majdyn/analytics.hpp"
#include "majdyn/bounds_solver.hpp"
#include "majdyn/experiments.hpp"
#include "majdyn/fourier_lab.hpp"
#include "majdyn/graph.hpp"
#include "majdyn/numerics.hpp"
#include "majdyn/trial_pool.hpp"

namespace {

using majdyn::ExperimentConfig;
using majdyn::ExperimentKind;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitThreshold = 2;

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

struct CommonOptions {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out;
  std::string csv;
  std::optional<unsigned> workers;
  bool check = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "JSON config file; flags override its keys")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--trials", o.trials, "number of trials");
  cmd->add_option("--out", o.out, "write the JSON record here instead of stdout");
  cmd->add_option("--csv", o.csv, "per-trial sample CSV (default: --out with .csv extension)");
  cmd->add_option("--workers", o.workers, "worker threads (default $MAJDYN_WORKERS or all cores)");
  cmd->add_flag("--check", o.check, "apply pass/fail thresholds; exit 2 on failure");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
  }
}

void emit(const json& record, const std::string& out) {
  if (out.empty()) {
    std::cout << record.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << record.dump(2) << '\n';
}

int report_checks(const std::vector<Check>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitThreshold;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::vector<Check> experiment_checks(const ExperimentConfig& c, const json& s) {
  std::vector<Check> out;
  switch (c.kind) {
    case ExperimentKind::Clt: {
      if (s["variance_ratio"].is_null() || s["ks"].is_null()) {
        out.push_back({"clt", false, "needs at least two trials"});
        break;
      }
      const double ratio = s["variance_ratio"].get<double>();
      const double ks = s["ks"].get<double>();
      out.push_back({"variance_ratio in [0.9, 1.1]", ratio >= 0.9 && ratio <= 1.1, fmt(ratio)});
      out.push_back({"ks <= 0.03", ks <= 0.03, fmt(ks)});
      break;
    }
    case ExperimentKind::Fixation: {
      const auto cv = s["coupling_violations"].get<std::uint64_t>();
      const auto dv = s["domination_violations"].get<std::uint64_t>();
      const double z = s["z_score"].get<double>();
      out.push_back({"coupling violations == 0", cv == 0, std::to_string(cv)});
      out.push_back({"domination violations == 0", dv == 0, std::to_string(dv)});
      out.push_back({"advantage z >= 3", z >= 3.0, fmt(z)});
      break;
    }
    case ExperimentKind::Proposition: {
      const auto f = s["failures"].get<std::uint64_t>();
      out.push_back({"failures == 0", f == 0, std::to_string(f)});
      break;
    }
    case ExperimentKind::Swing: {
      const double rel = s["relative_error"].get<double>();
      out.push_back({"|mean - prediction| / prediction <= 0.3", rel <= 0.3, fmt(rel)});
      break;
    }
    case ExperimentKind::ConjectureScan:
      out.push_back({"scan completed (no threshold)", true,
                     "strict rate " + fmt(s["strict_violation_rate"].get<double>())});
      break;
    case ExperimentKind::Steps: {
      const double rate = s["success_rate"].get<double>();
      out.push_back({"success rate >= 0.95", rate >= 0.95, fmt(rate)});
      break;
    }
  }
  return out;
}

std::string sidecar_path(const CommonOptions& o, const std::string& out) {
  if (!o.csv.empty()) return o.csv;
  if (out.empty()) return {};
  return std::filesystem::path(out).replace_extension(".csv").string();
}

// Registers an experiment subcommand. `flags` adds kind-specific options
// writing into `overrides`, which is applied on top of the config file.
void add_experiment(CLI::App& app, const char* name, const char* help, ExperimentKind kind,
                    std::function<void(CLI::App*, json&)> flags, std::function<int()>& action) {
  auto* cmd = app.add_subcommand(name, help);
  auto opts = std::make_shared<CommonOptions>();
  auto overrides = std::make_shared<json>(json::object());
  add_common(cmd, *opts);
  flags(cmd, *overrides);
  cmd->callback([cmd, kind, opts, overrides, &action] {
    action = [cmd, kind, opts, overrides]() -> int {
      ExperimentConfig config;
      config.kind = kind;
      if (!opts->config_file.empty()) {
        json file = read_json_file(opts->config_file);
        file.erase("kind");
        config.merge_json(file);
      }
      // Kind-specific flags land in overrides only when given.
      config.merge_json(*overrides);
      if (const auto* f = cmd->get_option_no_throw("--implicit"); f && f->count() > 0) {
        config.representation = majdyn::Representation::Implicit;
      }
      if (opts->seed) config.master_seed = *opts->seed;
      if (opts->trials) config.trials = *opts->trials;
      if (!opts->out.empty()) config.output_path = opts->out;
      config.validate();

      const unsigned workers = majdyn::resolve_workers(opts->workers);
      const auto start = std::chrono::steady_clock::now();
      const majdyn::ExperimentRecord rec = majdyn::run_experiment(config, workers);
      const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
      std::cerr << to_string(kind) << ": " << config.trials << " trials in " << fmt(secs.count())
                << " s on " << workers << " worker(s)\n";

      emit(rec.to_json(), config.output_path);
      if (const auto csv = sidecar_path(*opts, config.output_path); !csv.empty()) {
        std::ofstream f(csv);
        if (!f) throw std::runtime_error("cannot write " + csv);
        rec.write_samples_csv(f);
      }
      return opts->check ? report_checks(experiment_checks(config, rec.summary)) : kExitOk;
    };
  });
}

// Binds an option that stores into overrides[key] when given.
template <class T>
void bind_flag(CLI::App* cmd, json& overrides, const std::string& flag, const std::string& key,
          const std::string& help) {
  cmd->add_option_function<T>(flag, [&overrides, key](const T& v) { overrides[key] = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majority dynamics on G(n,p): exact numerics, Fourier checks and Monte Carlo experiments"};
  app.require_subcommand(1);
  std::function<int()> action;

  add_experiment(app, "clt-experiment", "|R_1| variance and normal-limit check", ExperimentKind::Clt,
                 [](CLI::App* c, json& o) {
                   bind_flag<std::uint32_t>(c, o, "--r0", "r0", "initial red count");
                   bind_flag<std::uint32_t>(c, o, "--b0", "b0", "initial blue count");
                   bind_flag<double>(c, o, "--p", "p", "edge probability");
                 },
                 action);
  add_experiment(app, "fixation-experiment", "coupled X-red / X-blue runs on one graph",
                 ExperimentKind::Fixation,
                 [](CLI::App* c, json& o) {
                   bind_flag<std::uint32_t>(c, o, "--n", "n", "vertex count");
                   bind_flag<std::uint32_t>(c, o, "--delta", "delta", "size of the swing block X");
                   bind_flag<double>(c, o, "--p", "p", "edge probability");
                   bind_flag<int>(c, o, "--max-steps", "max_steps", "step cap");
                   bind_flag<std::uint32_t>(c, o, "--traces", "traces", "trials whose traces are kept");
                 },
                 action);
  add_experiment(app, "prop-experiment", "opposing-majority count for a fixed leading set",
                 ExperimentKind::Proposition,
                 [](CLI::App* c, json& o) {
                   bind_flag<std::uint32_t>(c, o, "--n", "n", "vertex count");
                   bind_flag<double>(c, o, "--p", "p", "edge probability");
                   bind_flag<double>(c, o, "--alpha", "alpha", "lead coefficient");
                   bind_flag<double>(c, o, "--delta-frac", "delta_frac", "allowed fraction of vertices");
                 },
                 action);
  add_experiment(app, "swing-experiment", "size of the swing sets T_R and T_B", ExperimentKind::Swing,
                 [](CLI::App* c, json& o) {
                   bind_flag<std::uint32_t>(c, o, "--m", "m", "|R| = |B|");
                   bind_flag<std::uint32_t>(c, o, "--x", "x", "|X|");
                   bind_flag<double>(c, o, "--p", "p", "edge probability");
                 },
                 action);
  add_experiment(app, "conjecture-scan", "does the step-1 leader keep growing until unanimity",
                 ExperimentKind::ConjectureScan,
                 [](CLI::App* c, json& o) {
                   bind_flag<std::uint32_t>(c, o, "--r0", "r0", "initial red count");
                   bind_flag<std::uint32_t>(c, o, "--b0", "b0", "initial blue count");
                   bind_flag<double>(c, o, "--p", "p", "edge probability");
                   bind_flag<int>(c, o, "--max-steps", "max_steps", "step cap");
                   c->add_flag("--implicit", "use the implicit engine");
                 },
                 action);
  add_experiment(app, "steps-experiment", "steps to unanimity from a uniformly random colouring",
                 ExperimentKind::Steps,
                 [](CLI::App* c, json& o) {
                   bind_flag<std::uint32_t>(c, o, "--n", "n", "vertex count");
                   bind_flag<double>(c, o, "--p", "p", "edge probability");
                   bind_flag<int>(c, o, "--max-steps", "max_steps", "step cap");
                   bind_flag<int>(c, o, "--horizon", "step_horizon", "success horizon in steps");
                   c->add_flag("--implicit", "use the implicit engine");
                 },
                 action);

  // diff-dist
  {
    auto* cmd = app.add_subcommand("diff-dist", "exact law of Bin(n,p) - Bin(m,p)");
    auto n = std::make_shared<std::int64_t>(0);
    auto m = std::make_shared<std::int64_t>(0);
    auto p = std::make_shared<double>(0.5);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--n", *n, "positive trials")->required();
    cmd->add_option("--m", *m, "negative trials")->required();
    cmd->add_option("--p", *p, "success probability")->required();
    cmd->add_option("--out", *out, "output path");
    cmd->callback([=, &action] {
      action = [=] {
        const auto dist = majdyn::diff_distribution(*n, *m, *p);
        json j = dist.to_json();
        j["anticoncentration"] = majdyn::anticoncentration_report(dist).to_json();
        j["mean"] = dist.mean();
        j["variance"] = dist.variance();
        emit(j, *out);
        return kExitOk;
      };
    });
  }

  // solve-alpha
  {
    auto* cmd = app.add_subcommand("solve-alpha", "sup over gamma and the minimal feasible alpha");
    auto delta = std::make_shared<double>(0.499);
    auto eps = std::make_shared<double>(1e-10);
    auto alpha = std::make_shared<double>(majdyn::kFixationAlpha);
    auto out = std::make_shared<std::string>();
    auto check = std::make_shared<bool>(false);
    cmd->add_option("--delta", *delta, "fraction bound")->capture_default_str();
    cmd->add_option("--eps", *eps, "slack below 1/4")->capture_default_str();
    cmd->add_option("--alpha", *alpha, "alpha to test for feasibility")->capture_default_str();
    cmd->add_option("--out", *out, "output path");
    cmd->add_flag("--check", *check, "exit 2 unless alpha is feasible and alpha_star <= alpha");
    cmd->callback([=, &action] {
      action = [=] {
        const auto start = std::chrono::steady_clock::now();
        majdyn::PropositionQuery q{*eps, *delta, *alpha};
        q.validate();
        const double star = majdyn::min_alpha(*delta, *eps);
        const auto at_star = majdyn::sup_over_gamma(star, *delta);
        const auto at_alpha = majdyn::sup_over_gamma(*alpha, *delta);
        const bool feasible = majdyn::feasibility_check(q);
        const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
        json j{{"delta", *delta},
               {"eps", *eps},
               {"alpha_star", star},
               {"at_alpha_star", at_star.to_json()},
               {"alpha", *alpha},
               {"feasible", feasible},
               {"sup_value", at_alpha.sup_value},
               {"gamma_argmax", at_alpha.gamma_argmax},
               {"limit", 0.25 - *eps}};
        emit(j, *out);
        std::cerr << "solve-alpha: " << fmt(secs.count()) << " s\n";
        if (!*check) return kExitOk;
        return report_checks({{"alpha feasible", feasible, fmt(at_alpha.sup_value)},
                              {"alpha_star <= alpha", star <= *alpha, fmt(star)}});
      };
    });
  }

  // verify-fourier
  {
    auto* cmd = app.add_subcommand("verify-fourier", "exact p-biased Fourier checks on a tiny model");
    auto r0 = std::make_shared<std::uint32_t>(2);
    auto b0 = std::make_shared<std::uint32_t>(2);
    auto p = std::make_shared<double>(0.5);
    auto k = std::make_shared<int>(1);
    auto tol = std::make_shared<double>(1e-10);
    auto out = std::make_shared<std::string>();
    auto check = std::make_shared<bool>(false);
    cmd->add_option("--r0", *r0, "red vertices")->required();
    cmd->add_option("--b0", *b0, "blue vertices")->required();
    cmd->add_option("--p", *p, "edge probability")->required();
    cmd->add_option("--k", *k, "moment order for the set-size cutoff")->capture_default_str();
    cmd->add_option("--tol", *tol, "tolerance for --check")->capture_default_str();
    cmd->add_option("--out", *out, "output path");
    cmd->add_flag("--check", *check, "exit 2 if an identity fails at --tol");
    cmd->callback([=, &action] {
      action = [=] {
        const majdyn::TinyModel model(*r0, *b0, *p);
        const auto rep = majdyn::verify_fourier_facts(model, *k);
        json moments = json::array();
        for (int order = 1; order <= 6; ++order) {
          moments.push_back(majdyn::moment_bruteforce(model, order).to_json());
        }
        json j = rep.to_json();
        j["moments"] = std::move(moments);
        emit(j, *out);
        if (!*check) return kExitOk;
        return report_checks({{"fourier identities", rep.passes(*tol), "tol " + fmt(*tol)}});
      };
    });
  }

  // sample-dynamics
  {
    auto* cmd = app.add_subcommand("sample-dynamics", "one trajectory of majority dynamics");
    auto n = std::make_shared<std::uint32_t>(0);
    auto p = std::make_shared<double>(0.5);
    auto r0 = std::make_shared<std::uint32_t>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto max_steps = std::make_shared<int>(100);
    auto implicit = std::make_shared<bool>(false);
    auto edges = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--n", *n, "vertex count")->required();
    cmd->add_option("--p", *p, "edge probability")->required();
    cmd->add_option("--r0", *r0, "initial red count (vertices 0..r0-1)")->required();
    cmd->add_option("--seed", *seed, "graph seed")->capture_default_str();
    cmd->add_option("--max-steps", *max_steps, "step cap")->capture_default_str();
    auto* dense_flag = cmd->add_flag("--dense", "bit-packed engine (default)");
    cmd->add_flag("--implicit", *implicit, "hash-oracle engine")->excludes(dense_flag);
    cmd->add_option("--edges", *edges, "also write the graph as a 'u v' edge list");
    cmd->add_option("--out", *out, "output path");
    cmd->callback([=, &action] {
      action = [=] {
        const majdyn::GraphSpec spec{*n, *p, *seed,
                                     *implicit ? majdyn::Representation::Implicit
                                               : majdyn::Representation::Dense};
        spec.validate();
        const auto initial = majdyn::Coloring::canonical(*n, *r0);
        const auto traj = majdyn::run_dynamics(spec, initial, *max_steps);
        json j = traj.to_json();
        j["n"] = *n;
        j["p"] = *p;
        j["r0"] = *r0;
        j["seed"] = *seed;
        j["representation"] = *implicit ? "implicit" : "dense";
        emit(j, *out);
        if (!edges->empty()) {
          std::ofstream f(*edges);
          if (!f) throw std::runtime_error("cannot write " + *edges);
          const auto oracle = spec.oracle();
          for (std::uint32_t u = 0; u < *n; ++u) {
            for (std::uint32_t v = u + 1; v < *n; ++v) {
              if (oracle.present_ordered(u, v)) f << u << ' ' << v << '\n';
            }
          }
        }
        return kExitOk;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  try {
    return action ? action() : kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::length_error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
