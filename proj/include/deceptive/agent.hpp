#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "deceptive/bandit.hpp"
#include "deceptive/kl_boost.hpp"
#include "deceptive/posterior.hpp"
#include "deceptive/quadrature.hpp"
#include "deceptive/random.hpp"

namespace deceptive {

// How the boost target is chosen each step.
enum class BoostSchedule {
  algorithm1,              // leader/challenger top-two with IDS
  round_robin_suboptimal,  // cycle over the true public-suboptimal arms
};

// How the challenger is drawn given the leader.
enum class ChallengerRule {
  quadrature,  // renormalized optimal-arm probabilities without the leader
  rejection,   // resample the posterior until the argmax differs
};

struct AgentConfig {
  KlBudget epsilon = KlBudget::finite(0.1);
  double delta = 0.05;
  std::uint64_t max_steps = 100000;
  // Resampling attempts for ChallengerRule::rejection before falling back to
  // the quadrature rule.
  std::uint64_t mc_samples_for_selection = 1000;
  std::uint64_t init_pulls_per_arm = 1;
  BoostSolver solver = BoostSolver::exact;
  BoostSchedule schedule = BoostSchedule::algorithm1;
  ChallengerRule challenger_rule = ChallengerRule::quadrature;
  // When false the episode runs to max_steps even after the confidence
  // threshold is met (fixed-horizon traces).
  bool stop_on_confidence = true;

  void validate(std::size_t num_arms) const;
};

// Independent streams for one episode: selection draws, the action draw and
// one reward stream per arm. Reward streams are keyed by arm so runs that
// differ only in budget see the same reward sequence for each arm.
struct AgentStreams {
  AgentStreams(const RandomSource& root, std::size_t num_arms);

  RandomSource selection;
  RandomSource action;
  std::vector<RandomSource> rewards;
};

struct StepRecord {
  std::uint64_t step = 0;  // 1-based index of this pull
  std::size_t leader = 0;
  std::size_t challenger = 0;
  std::size_t boosted = 0;
  std::size_t pulled = 0;
  std::vector<double> reference_probs;  // empty for forced pulls
  std::vector<double> boosted_probs;    // empty for forced pulls
  double error_prob = 0.0;  // 1 - P(true best private arm optimal); NaN if undefined
  double kl_spent = 0.0;
  bool forced = false;      // initialization round-robin pull
};

class AgentState {
 public:
  explicit AgentState(std::size_t num_arms);

  std::size_t num_arms() const { return boost_counts.size(); }

  PosteriorState public_posterior;
  PosteriorState private_posterior;
  std::vector<std::uint64_t> boost_counts;
  std::uint64_t step = 0;
  bool stopped = false;
  std::optional<std::size_t> recommendation;

  // Optimal-arm probabilities of the current private posterior; valid after
  // initialization when the schedule or stopping rule needs them.
  std::vector<double> private_probs;
  bool private_probs_valid = false;

  // Scratch buffers reused across steps.
  std::vector<double> scratch_stddevs;
  std::vector<double> scratch_theta;
};

struct StoppingDecision {
  bool stop;
  std::size_t best;
  double p_star;
};

// Leader: argmax of one joint draw from the private posterior.
std::size_t select_leader(const PosteriorState& private_posterior,
                          double variance, RandomSource& rng);

// Challenger drawn from the private optimal-arm probabilities with the
// leader's entry removed; uniform over non-leaders when their mass < 1e-12.
std::size_t select_challenger(const PosteriorState& private_posterior,
                              double variance, std::size_t leader,
                              RandomSource& rng);
std::size_t select_challenger_from(std::span<const double> optimal_probs,
                                   std::size_t leader, RandomSource& rng);

// Boost target: the leader with probability N_c / (N_c + N_l), else the
// challenger. Throws std::invalid_argument when both counts are zero.
std::size_t ids_choice(std::size_t leader, std::size_t challenger,
                       std::span<const std::uint64_t> counts, RandomSource& rng);

StoppingDecision check_stopping(const PosteriorState& private_posterior,
                                double variance, double delta,
                                const QuadratureRule& rule = default_quadrature());

// Forced round-robin: init_pulls_per_arm pulls of each arm in index order.
// Appends one forced record per pull when `records` is non-null.
void initialize_agent(AgentState& state, const BanditInstance& instance,
                      const AgentConfig& config, AgentStreams& streams,
                      std::vector<StepRecord>* records = nullptr);

// One iteration of the main loop; fills `record` in place (buffers reused).
void agent_step(AgentState& state, const BanditInstance& instance,
                const AgentConfig& config, AgentStreams& streams,
                StepRecord& record);

StepRecord agent_step(AgentState& state, const BanditInstance& instance,
                      const AgentConfig& config, AgentStreams& streams);

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  std::optional<std::size_t> recommendation;
  AgentState final_state;
};

// Initialization followed by agent_step until the stopping rule fires (if
// enabled) or max_steps pulls have been made.
EpisodeTrace run_episode(const BanditInstance& instance,
                         const AgentConfig& config, const RandomSource& rng);

// One CSV row per step: seed, step, leader, challenger, boosted, pulled,
// error_prob, kl_spent, n_0..n_{K-1}, boost_0..boost_{K-1}. The count columns
// are recomputed cumulatively from the records.
void write_trace_header(std::ostream& os, std::size_t num_arms);
// Single row given the cumulative pull and boost counts after `record`.
void write_trace_row(std::ostream& os, std::uint64_t seed,
                     const StepRecord& record,
                     std::span<const std::uint64_t> pulls,
                     std::span<const std::uint64_t> boosts);
void write_trace_csv(std::ostream& os, std::uint64_t seed,
                     const EpisodeTrace& trace, std::size_t num_arms);

}  // namespace deceptive
