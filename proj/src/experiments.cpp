#include "deceptive/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "deceptive/decay.hpp"
#include "deceptive/errors.hpp"
#include "deceptive/kl_boost.hpp"
#include "deceptive/parallel.hpp"

namespace deceptive {
namespace {

template <class Fn>
auto fan_out(std::uint64_t n, int threads, bool serial, Fn&& fn) {
  return serial ? map_seeds_serial(n, fn) : map_seeds(n, threads, fn);
}

std::vector<double> as_reals(const std::vector<std::uint64_t>& grid) {
  return {grid.begin(), grid.end()};
}

std::string arm_label(std::size_t a) { return "arm" + std::to_string(a); }

// Name prefix used only when a run covers several instances.
std::string prefix(const ExperimentConfig& config, const NamedInstance& inst) {
  return config.instances.size() > 1 ? inst.name + "_" : std::string();
}

// Column `column` of every seed's [time][column] matrix.
std::vector<std::vector<double>> column(
    const std::vector<EpisodeSamples>& runs,
    std::vector<std::vector<double>> EpisodeSamples::*field, std::size_t col) {
  std::vector<std::vector<double>> out;
  out.reserve(runs.size());
  for (const auto& r : runs) {
    std::vector<double> v;
    v.reserve((r.*field).size());
    for (const auto& row : r.*field) v.push_back(row[col]);
    out.push_back(std::move(v));
  }
  return out;
}

void collect_traces(const ExperimentConfig& config, std::size_t num_arms,
                    std::string label, const std::vector<EpisodeSamples>& runs,
                    ExperimentResult& result) {
  if (config.trace_path.empty()) return;
  std::ostringstream os;
  write_trace_header(os, num_arms);
  for (const auto& r : runs) os << r.trace;
  result.traces.emplace_back(std::move(label), os.str());
}

SampleOptions options_for(const ExperimentConfig& config, std::uint64_t seed) {
  SampleOptions o;
  o.trace = !config.trace_path.empty();
  o.trace_seed = seed;
  return o;
}

std::string sanitize(std::string label) {
  for (char& c : label) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')) c = '_';
  }
  return label;
}

void check_writable(std::ofstream& out, const std::string& path) {
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
}

}  // namespace

std::vector<std::uint64_t> time_grid(std::uint64_t horizon, std::uint64_t points,
                                     std::uint64_t min_time) {
  if (horizon == 0 || points == 0) {
    throw std::invalid_argument("time_grid: horizon and points must be >= 1");
  }
  std::vector<std::uint64_t> grid;
  grid.reserve(points);
  for (std::uint64_t i = 1; i <= points; ++i) {
    const double raw = std::round(static_cast<double>(horizon) *
                                  static_cast<double>(i) /
                                  static_cast<double>(points));
    std::uint64_t t = std::max<std::uint64_t>(min_time,
                                              static_cast<std::uint64_t>(raw));
    t = std::min(t, horizon);
    if (grid.empty() || t > grid.back()) grid.push_back(t);
  }
  return grid;
}

void KlAudit::merge(const KlAudit& other) {
  steps += other.steps;
  max_kl = std::max(max_kl, other.max_kl);
  max_excess = std::max(max_excess, other.max_excess);
  violations += other.violations;
  bitwise_equal_when_zero = bitwise_equal_when_zero && other.bitwise_equal_when_zero;
}

EpisodeSamples run_sampled_episode(const BanditInstance& instance,
                                   const AgentConfig& config,
                                   const RandomSource& rng,
                                   const std::vector<std::uint64_t>& grid,
                                   const SampleOptions& options) {
  const std::size_t k = instance.num_arms();
  AgentStreams streams(rng, k);
  AgentState state(k);
  EpisodeSamples out;
  out.audit.budget = config.epsilon;
  out.pulls.reserve(grid.size());
  out.boosts.reserve(grid.size());
  out.error_prob.reserve(grid.size());

  std::vector<std::uint64_t> pulls(k, 0), boosts(k, 0);
  std::ostringstream trace;
  StepRecord record;
  double last_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t next = 0;

  auto observe = [&](const StepRecord& r) {
    ++pulls[r.pulled];
    if (!r.forced) ++boosts[r.boosted];
    last_error = r.error_prob;
    if (options.trace) write_trace_row(trace, options.trace_seed, r, pulls, boosts);
    while (next < grid.size() && grid[next] == state.step) {
      out.pulls.emplace_back(pulls.begin(), pulls.end());
      out.boosts.emplace_back(boosts.begin(), boosts.end());
      out.error_prob.push_back(last_error);
      if (options.gaps) {
        const auto w = boosting_proportions(boosts, *options.gaps);
        out.gamma_gap.push_back(options.gamma_star - gamma(w, *options.gaps));
      }
      ++next;
    }
  };

  std::vector<StepRecord> init;
  initialize_agent(state, instance, config, streams, &init);
  for (const auto& r : init) observe(r);

  const bool zero_budget =
      !config.epsilon.is_unconstrained() && config.epsilon.value() == 0.0;
  while (!state.stopped && state.step < config.max_steps) {
    agent_step(state, instance, config, streams, record);
    if (options.audit) {
      KlAudit& a = out.audit;
      ++a.steps;
      const double kl = kl_divergence(record.boosted_probs, record.reference_probs);
      a.max_kl = std::max(a.max_kl, kl);
      if (!config.epsilon.is_unconstrained()) {
        const double excess = kl - config.epsilon.value();
        a.max_excess = std::max(a.max_excess, excess);
        if (!(excess <= kKlAuditTolerance)) ++a.violations;
      }
      if (zero_budget &&
          std::memcmp(record.boosted_probs.data(), record.reference_probs.data(),
                      k * sizeof(double)) != 0) {
        a.bitwise_equal_when_zero = false;
      }
    }
    observe(record);
  }
  // Early stop: hold the final state for the remaining grid times.
  while (next < grid.size()) {
    out.pulls.emplace_back(pulls.begin(), pulls.end());
    out.boosts.emplace_back(boosts.begin(), boosts.end());
    out.error_prob.push_back(last_error);
    if (options.gaps) {
      const auto w = boosting_proportions(boosts, *options.gaps);
      out.gamma_gap.push_back(options.gamma_star - gamma(w, *options.gaps));
    }
    ++next;
  }
  out.recommendation = state.recommendation;
  out.trace = trace.str();
  return out;
}

AgentConfig agent_config_for(const ExperimentConfig& config, KlBudget budget) {
  AgentConfig a;
  a.epsilon = budget;
  a.delta = config.delta;
  a.max_steps = config.horizon;
  a.solver = config.boost_solver;
  a.schedule = config.boost_schedule;
  a.stop_on_confidence = config.stop_on_confidence;
  return a;
}

RandomSource seed_stream(const ExperimentConfig& config, std::uint64_t seed) {
  return RandomSource(config.base_seed).substream(seed);
}

std::string budget_label(const KlBudget& budget) {
  return "eps=" + budget.to_string();
}

ExperimentResult run_rate(const ExperimentConfig& config, bool serial) {
  config.validate();
  ExperimentResult result;
  const NamedInstance& inst = config.instances.front();
  const BanditInstance& b = inst.instance;
  const std::size_t k = b.num_arms();
  const KlBudget budget = config.epsilons.front();
  const AgentConfig agent = agent_config_for(config, budget);
  const auto grid = time_grid(config.horizon, config.grid_points, k);
  const auto times = as_reals(grid);

  const auto runs = fan_out(config.seeds, config.threads, serial, [&](std::uint64_t s) {
    return run_sampled_episode(b, agent, seed_stream(config, s), grid,
                               options_for(config, s));
  });
  collect_traces(config, k, inst.name, runs, result);

  // Round-robin boosting gives each public-suboptimal arm an equal share.
  const double share = 1.0 / static_cast<double>(k - 1);
  const std::string pre = prefix(config, inst);
  for (std::size_t a = 0; a < k; ++a) {
    if (a == b.best_public()) continue;
    result.series.push_back(aggregate(pre + "pulls_" + arm_label(a), times,
                                      column(runs, &EpisodeSamples::pulls, a)));
    const double gap = b.public_means()[b.best_public()] - b.public_means()[a];
    std::vector<double> phi;
    phi.reserve(grid.size());
    for (auto t : grid) {
      phi.push_back(predicted_pulls(budget.value(), b.variance(), gap, share,
                                    static_cast<double>(t)));
    }
    result.series.push_back(exact_series(pre + "phi_" + arm_label(a), times, phi));
  }
  if (config.decay.enabled) {
    auto decay = run_decay(config.decay, config.grid_points,
                           RandomSource(config.base_seed).substream(1u << 20),
                           config.threads, serial);
    for (auto& s : decay) result.series.push_back(std::move(s));
  }
  return result;
}

ExperimentResult run_eps_sweep(const ExperimentConfig& config, bool serial) {
  config.validate();
  ExperimentResult result;
  for (const auto& inst : config.instances) {
    const BanditInstance& b = inst.instance;
    const auto grid = time_grid(config.horizon, config.grid_points, b.num_arms());
    const auto times = as_reals(grid);
    for (const KlBudget& budget : config.epsilons) {
      const AgentConfig agent = agent_config_for(config, budget);
      const auto runs =
          fan_out(config.seeds, config.threads, serial, [&](std::uint64_t s) {
            SampleOptions opt = options_for(config, s);
            opt.audit = true;
            return run_sampled_episode(b, agent, seed_stream(config, s), grid, opt);
          });
      std::vector<std::vector<double>> err;
      err.reserve(runs.size());
      KlAudit audit;
      audit.budget = budget;
      for (const auto& r : runs) {
        err.push_back(r.error_prob);
        audit.merge(r.audit);
      }
      collect_traces(config, b.num_arms(),
                     inst.name + "_" + budget_label(budget), runs, result);
      auto series = aggregate(prefix(config, inst) + budget_label(budget), times, err);
      if (series.single_seed) {
        result.warnings.push_back(series.name + ": single seed, zero-width band");
      }
      result.series.push_back(std::move(series));
      result.audits.push_back(audit);
    }
  }
  return result;
}

ExperimentResult run_asymmetry(const ExperimentConfig& config, bool serial) {
  config.validate();
  ExperimentResult result;
  const KlBudget budget = config.epsilons.front();
  const AgentConfig agent = agent_config_for(config, budget);
  for (const auto& inst : config.instances) {
    const BanditInstance& b = inst.instance;
    const std::size_t k = b.num_arms();
    const auto grid = time_grid(config.horizon, config.grid_points, k);
    const auto times = as_reals(grid);
    const auto runs =
        fan_out(config.seeds, config.threads, serial, [&](std::uint64_t s) {
          return run_sampled_episode(b, agent, seed_stream(config, s), grid,
                                     options_for(config, s));
        });
    collect_traces(config, k, inst.name, runs, result);
    for (std::size_t a = 0; a < k; ++a) {
      auto counts = column(runs, &EpisodeSamples::pulls, a);
      for (auto& row : counts) {
        for (std::size_t i = 0; i < row.size(); ++i) row[i] /= times[i];
      }
      result.series.push_back(
          aggregate(inst.name + "_share_" + arm_label(a), times, counts));
    }
  }
  return result;
}

ExperimentResult run_gamma_convergence(const ExperimentConfig& config,
                                       bool serial) {
  config.validate();
  ExperimentResult result;
  const KlBudget budget = config.epsilons.front();
  const AgentConfig agent = agent_config_for(config, budget);
  for (const auto& inst : config.instances) {
    const BanditInstance& b = inst.instance;
    const GapStructure gaps = gap_structure(b);
    const AllocationSolution opt = solve_allocation(gaps);
    const auto grid = time_grid(config.horizon, config.grid_points, b.num_arms());
    const auto times = as_reals(grid);
    const auto runs =
        fan_out(config.seeds, config.threads, serial, [&](std::uint64_t s) {
          SampleOptions o = options_for(config, s);
          o.gaps = &gaps;
          o.gamma_star = opt.gamma_star;
          return run_sampled_episode(b, agent, seed_stream(config, s), grid, o);
        });
    collect_traces(config, b.num_arms(), inst.name, runs, result);
    std::vector<std::vector<double>> gap_series;
    gap_series.reserve(runs.size());
    for (const auto& r : runs) gap_series.push_back(r.gamma_gap);
    result.series.push_back(aggregate(inst.name + "_gamma_gap", times, gap_series));
  }
  return result;
}

std::vector<AggregateSeries> run_decay(const DecaySettings& settings,
                                       std::uint64_t grid_points,
                                       const RandomSource& root, int threads,
                                       bool serial) {
  const DecayProcessParams params{settings.c, settings.m0, settings.horizon};
  params.validate();
  const auto grid = time_grid(settings.horizon, grid_points, 1);
  const auto times = as_reals(grid);
  const auto runs = fan_out(settings.seeds, threads, serial, [&](std::uint64_t s) {
    RandomSource rng = root.substream(s);
    const SuccessTrace trace = simulate_decay_jump(params, rng);
    std::vector<double> v;
    v.reserve(grid.size());
    for (auto t : grid) v.push_back(trace.success_counts[t]);
    return v;
  });
  std::vector<double> reference;
  reference.reserve(grid.size());
  for (auto t : grid) reference.push_back(std::sqrt(2.0 * settings.c * static_cast<double>(t)));
  return {aggregate("decay_M", times, runs),
          exact_series("decay_sqrt_2ct", times, reference)};
}

void write_allocation_csv(std::ostream& os,
                          const std::vector<NamedInstance>& instances) {
  os << "instance,arm,weight,gamma_star,y_star,case,residual\n";
  for (const auto& inst : instances) {
    const AllocationSolution sol = solve_allocation(gap_structure(inst.instance));
    for (std::size_t i = 0; i < sol.arms.size(); ++i) {
      os << inst.name << ',' << sol.arms[i] << ',' << format_real(sol.weights[i])
         << ',' << format_real(sol.gamma_star) << ',' << format_real(sol.y_star)
         << ',' << to_string(sol.allocation_case) << ','
         << format_real(sol.residual) << '\n';
    }
  }
}

void write_boost_curve_csv(std::ostream& os, const BoostCurveSettings& s) {
  os << "p,q_star,q_hat\n";
  const double lo = std::log(s.p_min), hi = std::log(s.p_max);
  const KlBudget budget = KlBudget::finite(s.epsilon);
  for (std::uint64_t i = 0; i < s.points; ++i) {
    const double p = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                       static_cast<double>(s.points - 1));
    os << format_real(p) << ',' << format_real(boost_probability(p, budget)) << ','
       << format_real(boost_probability_approx(p, s.epsilon)) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.output_path.empty()) {
    throw ConfigError("config: output_path is required");
  }
  std::ofstream out(config.output_path, std::ios::binary);
  check_writable(out, config.output_path);

  ExperimentResult result;
  switch (config.kind) {
    case ExperimentKind::rate: result = run_rate(config); break;
    case ExperimentKind::eps_sweep: result = run_eps_sweep(config); break;
    case ExperimentKind::asymmetry: result = run_asymmetry(config); break;
    case ExperimentKind::gamma_convergence:
      result = run_gamma_convergence(config);
      break;
    case ExperimentKind::decay:
      result.series = run_decay(config.decay, config.grid_points,
                                RandomSource(config.base_seed), config.threads);
      break;
    case ExperimentKind::allocate:
      write_allocation_csv(out, config.instances);
      check_writable(out, config.output_path);
      return result;
    case ExperimentKind::boost_curve:
      write_boost_curve_csv(out, config.boost_curve);
      check_writable(out, config.output_path);
      return result;
  }
  write_series_csv(out, result.series);
  out.flush();
  check_writable(out, config.output_path);

  if (!config.trace_path.empty()) {
    const std::filesystem::path base(config.trace_path);
    for (const auto& [label, text] : result.traces) {
      std::filesystem::path path = base;
      if (result.traces.size() > 1) {
        path = base.parent_path() /
               (base.stem().string() + "_" + sanitize(label) + base.extension().string());
      }
      std::ofstream t(path, std::ios::binary);
      check_writable(t, path.string());
      t << text;
      t.flush();
      check_writable(t, path.string());
    }
  }
  return result;
}

}  // namespace deceptive
