#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "deceptive/agent.hpp"
#include "deceptive/aggregate.hpp"
#include "deceptive/allocation.hpp"
#include "deceptive/config.hpp"

namespace deceptive {

// Sample times t_i = max(min_time, round(horizon * i / points)), i = 1..points,
// with duplicates removed. Always ends at horizon.
std::vector<std::uint64_t> time_grid(std::uint64_t horizon, std::uint64_t points,
                                     std::uint64_t min_time);

// Per-step check that the played distribution stays inside the KL ball.
struct KlAudit {
  KlBudget budget = KlBudget::unconstrained();
  std::uint64_t steps = 0;      // boosted steps inspected
  double max_kl = 0.0;          // largest full-vector KL seen
  double max_excess = 0.0;      // max(0, KL - eps); 0 when unconstrained
  std::uint64_t violations = 0; // steps with KL > eps + 1e-9
  bool bitwise_equal_when_zero = true;  // eps = 0: boosted == reference

  void merge(const KlAudit& other);
  bool passed() const { return violations == 0 && bitwise_equal_when_zero; }
};

inline constexpr double kKlAuditTolerance = 1e-9;

struct SampleOptions {
  bool audit = false;
  const GapStructure* gaps = nullptr;  // set to record Gamma(w_t)
  double gamma_star = 0.0;
  bool trace = false;                  // keep per-step CSV rows
  std::uint64_t trace_seed = 0;
};

// One episode observed at the grid times. Rows are indexed like the grid;
// values after an early stop carry the last state forward.
struct EpisodeSamples {
  std::vector<std::vector<double>> pulls;   // [time][arm]
  std::vector<std::vector<double>> boosts;  // [time][arm]
  std::vector<double> error_prob;
  std::vector<double> gamma_gap;            // Gamma* - Gamma(w_t), if requested
  std::optional<std::size_t> recommendation;
  KlAudit audit;
  std::string trace;
};

EpisodeSamples run_sampled_episode(const BanditInstance& instance,
                                   const AgentConfig& config,
                                   const RandomSource& rng,
                                   const std::vector<std::uint64_t>& grid,
                                   const SampleOptions& options = {});

struct ExperimentResult {
  std::vector<AggregateSeries> series;
  std::vector<KlAudit> audits;          // eps_sweep only, one per budget
  std::vector<std::string> warnings;
  // Per-step traces (when trace_path is set): label and CSV text, one entry
  // per instance/budget combination.
  std::vector<std::pair<std::string, std::string>> traces;
};

// Agent settings implied by an experiment config for a given budget.
AgentConfig agent_config_for(const ExperimentConfig& config, KlBudget budget);

// Root stream of seed s; shared by every budget and instance of a run so
// they see common random numbers.
RandomSource seed_stream(const ExperimentConfig& config, std::uint64_t seed);

std::string budget_label(const KlBudget& budget);

// Runners. Seeds run in parallel (config.threads) with results reduced in seed
// order, so the output does not depend on the thread count. When `serial` is
// set the seed loop runs on the calling thread only.
ExperimentResult run_rate(const ExperimentConfig& config, bool serial = false);
ExperimentResult run_eps_sweep(const ExperimentConfig& config, bool serial = false);
ExperimentResult run_asymmetry(const ExperimentConfig& config, bool serial = false);
ExperimentResult run_gamma_convergence(const ExperimentConfig& config,
                                       bool serial = false);
// M_t of the decaying-success process with the sqrt(2 c t) reference.
std::vector<AggregateSeries> run_decay(const DecaySettings& settings,
                                       std::uint64_t grid_points,
                                       const RandomSource& root, int threads,
                                       bool serial = false);

// instance,arm,weight,gamma_star,y_star,case,residual
void write_allocation_csv(std::ostream& os,
                          const std::vector<NamedInstance>& instances);
// p,q_star,q_hat over a log-spaced grid of p.
void write_boost_curve_csv(std::ostream& os, const BoostCurveSettings& settings);

// Dispatches on config.kind and writes config.output_path. Traces go to
// trace_path, or to "<stem>_<label><ext>" files when a run has several. Throws std::runtime_error on I/O failure.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace deceptive
