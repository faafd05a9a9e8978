// Command-line front end for the experiment harness.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "deceptive/allocation.hpp"
#include "deceptive/config.hpp"
#include "deceptive/errors.hpp"
#include "deceptive/experiments.hpp"

namespace {

using namespace deceptive;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seeds;
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> grid_points;
  std::optional<std::uint64_t> base_seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::vector<std::string> epsilons;
  std::optional<std::string> solver;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_epsilons) {
  app->add_option("--config", f.config_path, "JSON config overlaid on the preset")
      ->check(CLI::ExistingFile);
  app->add_option("--preset", f.preset_name, "Built-in setup")
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  app->add_option("--seeds", f.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  app->add_option("--horizon", f.horizon, "Steps per episode")
      ->check(CLI::PositiveNumber);
  app->add_option("--grid-points", f.grid_points, "Sample times per series")
      ->check(CLI::PositiveNumber);
  app->add_option("--base-seed", f.base_seed, "Root seed");
  app->add_option("--out", f.out, "Output CSV path");
  app->add_option("--threads", f.threads, "Worker threads (0: default)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--solver", f.solver, "Boost solver")
      ->check(CLI::IsMember({"exact", "approximate"}));
  if (with_epsilons) {
    app->add_option("--epsilons", f.epsilons,
                    "KL budgets (numbers or 'inf'); replaces the preset list");
  }
}

ExperimentConfig resolve(const CommonFlags& f, const std::string& default_preset) {
  ExperimentConfig c =
      preset(f.preset_name.empty() ? default_preset : f.preset_name);
  if (!f.config_path.empty()) c = load_config(f.config_path, c);
  if (f.seeds) c.seeds = *f.seeds;
  if (f.horizon) c.horizon = *f.horizon;
  if (f.grid_points) c.grid_points = *f.grid_points;
  if (f.base_seed) c.base_seed = *f.base_seed;
  if (f.out) c.output_path = *f.out;
  if (f.threads) c.threads = *f.threads;
  if (f.solver) {
    c.boost_solver = *f.solver == "exact" ? BoostSolver::exact : BoostSolver::approximate;
  }
  if (!f.epsilons.empty()) {
    c.epsilons.clear();
    for (const auto& e : f.epsilons) {
      try {
        c.epsilons.push_back(KlBudget::parse(e));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("--epsilons: ") + ex.what());
      }
    }
  }
  c.validate();
  return c;
}

void require_kind(const ExperimentConfig& c, std::initializer_list<ExperimentKind> ok,
                  const std::string& command) {
  for (auto k : ok) {
    if (c.kind == k) return;
  }
  throw ConfigError(std::string("'") + command + "' cannot run experiment kind '" +
                    to_string(c.kind) + "'");
}

void report(const ExperimentConfig& c, const ExperimentResult& r) {
  std::cerr << to_string(c.kind) << ": " << c.seeds << " seeds, horizon "
            << c.horizon << ", wrote " << r.series.size() << " series to "
            << c.output_path << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& a : r.audits) {
    std::cerr << "kl audit " << budget_label(a.budget) << ": " << a.steps
              << " steps, max kl " << format_real(a.max_kl) << ", violations "
              << a.violations;
    if (!a.budget.is_unconstrained() && a.budget.value() == 0.0) {
      std::cerr << ", bitwise copy " << (a.bitwise_equal_when_zero ? "yes" : "NO");
    }
    std::cerr << '\n';
  }
}

nlohmann::json allocation_record(const NamedInstance& inst) {
  const GapStructure gaps = gap_structure(inst.instance);
  const AllocationSolution sol = solve_allocation(gaps);
  nlohmann::json weights = nlohmann::json::object();
  for (std::size_t i = 0; i < sol.arms.size(); ++i) {
    weights[std::to_string(sol.arms[i])] = sol.weights[i];
  }
  return {{"instance", inst.name},
          {"best_public", gaps.best_public},
          {"best_private", gaps.best_private},
          {"weights", weights},
          {"gamma_star", sol.gamma_star},
          {"y_star", sol.y_star},
          {"case", to_string(sol.allocation_case)},
          {"residual", sol.residual}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deceptive exploration in Gaussian bandits: experiment harness"};
  app.require_subcommand(1);

  CommonFlags sim_flags, rate_flags, gamma_flags;
  std::string trace_path;
  auto* simulate = app.add_subcommand(
      "simulate", "Error-probability sweep over KL budgets or sample-share runs");
  add_common(simulate, sim_flags, true);
  simulate->add_option("--trace", trace_path, "Write per-step traces to this CSV");

  auto* rate = app.add_subcommand(
      "rate", "Boosted pull counts vs the sqrt-rate predictor, plus the decay process");
  add_common(rate, rate_flags, true);
  bool no_decay = false;
  std::optional<std::uint64_t> decay_seeds, decay_horizon;
  rate->add_flag("--no-decay", no_decay, "Skip the decaying-success process");
  rate->add_option("--decay-seeds", decay_seeds, "Seeds for the decay process")
      ->check(CLI::PositiveNumber);
  rate->add_option("--decay-horizon", decay_horizon, "Trials for the decay process")
      ->check(CLI::PositiveNumber);

  auto* gamma_cmd = app.add_subcommand("gamma", "Convergence of Gamma(w_t) to Gamma*");
  add_common(gamma_cmd, gamma_flags, true);

  auto* allocate = app.add_subcommand(
      "allocate", "Optimal boosting allocation for the configured instances");
  std::string alloc_config, alloc_preset, alloc_out;
  allocate->add_option("--config", alloc_config, "JSON config with instance(s)")
      ->check(CLI::ExistingFile);
  allocate->add_option("--preset", alloc_preset, "Take instances from a preset")
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  allocate->add_option("--out", alloc_out, "Also write a CSV");

  auto* curve = app.add_subcommand("boost-curve", "(p, q*, q-hat) on a log grid");
  BoostCurveSettings curve_settings;
  std::string curve_out;
  curve->add_option("--epsilon", curve_settings.epsilon, "KL budget")
      ->check(CLI::PositiveNumber);
  curve->add_option("--p-min", curve_settings.p_min, "Smallest p");
  curve->add_option("--p-max", curve_settings.p_max, "Largest p");
  curve->add_option("--points", curve_settings.points, "Grid size");
  curve->add_option("--out", curve_out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      ExperimentConfig c = resolve(sim_flags, "fig2");
      if (!trace_path.empty()) c.trace_path = trace_path;
      require_kind(c, {ExperimentKind::eps_sweep, ExperimentKind::asymmetry},
                   "simulate");
      report(c, run_experiment(c));
    } else if (rate->parsed()) {
      ExperimentConfig c = resolve(rate_flags, "fig1");
      if (no_decay) c.decay.enabled = false;
      if (decay_seeds) c.decay.seeds = *decay_seeds;
      if (decay_horizon) c.decay.horizon = *decay_horizon;
      require_kind(c, {ExperimentKind::rate}, "rate");
      report(c, run_experiment(c));
    } else if (gamma_cmd->parsed()) {
      ExperimentConfig c = resolve(gamma_flags, "fig4");
      require_kind(c, {ExperimentKind::gamma_convergence}, "gamma");
      report(c, run_experiment(c));
    } else if (allocate->parsed()) {
      ExperimentConfig c = preset(alloc_preset.empty() ? "fig4" : alloc_preset);
      if (!alloc_config.empty()) {
        std::ifstream in(alloc_config);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError("config file '" + alloc_config +
                            "' is not valid JSON: " + e.what());
        }
        if (j.contains("public_means")) {
          c.instances = {{"instance", instance_from_json(j)}};
        } else {
          c = config_from_json(j, c);
        }
      }
      nlohmann::json records = nlohmann::json::array();
      for (const auto& inst : c.instances) records.push_back(allocation_record(inst));
      std::cout << records.dump(2) << '\n';
      if (!alloc_out.empty()) {
        std::ofstream out(alloc_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file '" + alloc_out + "'");
        write_allocation_csv(out, c.instances);
        if (!out.flush()) throw std::runtime_error("write failed: '" + alloc_out + "'");
      }
    } else if (curve->parsed()) {
      ExperimentConfig c = preset("boost_curve");
      c.boost_curve = curve_settings;
      c.validate();
      if (curve_out.empty()) {
        write_boost_curve_csv(std::cout, c.boost_curve);
      } else {
        std::ofstream out(curve_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file '" + curve_out + "'");
        write_boost_curve_csv(out, c.boost_curve);
        if (!out.flush()) throw std::runtime_error("write failed: '" + curve_out + "'");
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
