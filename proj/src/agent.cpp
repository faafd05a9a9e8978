#include "deceptive/agent.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "deceptive/optimal_arm.hpp"
#include "deceptive/simplex.hpp"

namespace deceptive {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs_private_probs(const AgentConfig& config) {
  return config.schedule == BoostSchedule::algorithm1 ||
         config.stop_on_confidence;
}

void refresh_private_probs(AgentState& state, double variance) {
  state.private_posterior.posterior_stddevs(variance, state.scratch_stddevs);
  optimal_arm_probabilities_into(state.private_posterior.empirical_means(),
                                 state.scratch_stddevs, default_quadrature(),
                                 state.private_probs);
  state.private_probs_valid = true;
}

double error_probability(std::span<const double> probs, std::size_t truth) {
  double err = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (a != truth) err += probs[a];
  }
  return err;
}

void after_pull(AgentState& state, const BanditInstance& instance,
                const AgentConfig& config, StepRecord& record) {
  record.error_prob = kNaN;
  if (!state.private_posterior.all_pulled() || !needs_private_probs(config)) {
    return;
  }
  refresh_private_probs(state, instance.variance());
  record.error_prob = error_probability(state.private_probs, instance.best_private());
  if (config.stop_on_confidence) {
    const std::size_t best = argmax(state.private_probs);
    if (state.private_probs[best] >= 1.0 - config.delta) {
      state.stopped = true;
      state.recommendation = best;
    }
  }
}

void pull(AgentState& state, const BanditInstance& instance,
          AgentStreams& streams, std::size_t arm) {
  const RewardPair r = sample_rewards(instance, arm, streams.rewards[arm]);
  state.public_posterior.record(arm, r.public_reward);
  state.private_posterior.record(arm, r.private_reward);
  ++state.step;
}

std::size_t round_robin_target(const AgentState& state,
                               const BanditInstance& instance,
                               const AgentConfig& config) {
  const std::size_t k = instance.num_arms();
  const std::uint64_t boosted = state.step - k * config.init_pulls_per_arm;
  std::size_t slot = static_cast<std::size_t>(boosted % (k - 1));
  // Skip the best public arm.
  return slot >= instance.best_public() ? slot + 1 : slot;
}

}  // namespace

void AgentConfig::validate(std::size_t num_arms) const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("agent config: delta must lie in (0, 1)");
  }
  if (init_pulls_per_arm == 0) {
    throw std::invalid_argument("agent config: init_pulls_per_arm must be >= 1");
  }
  if (max_steps < num_arms * init_pulls_per_arm) {
    throw std::invalid_argument(
        "agent config: max_steps must cover the initialization round");
  }
  if (mc_samples_for_selection == 0) {
    throw std::invalid_argument(
        "agent config: mc_samples_for_selection must be >= 1");
  }
}

AgentStreams::AgentStreams(const RandomSource& root, std::size_t num_arms)
    : selection(root.substream(0)), action(root.substream(1)) {
  rewards.reserve(num_arms);
  for (std::size_t a = 0; a < num_arms; ++a) {
    rewards.push_back(root.substream(1000 + a));
  }
}

AgentState::AgentState(std::size_t num_arms)
    : public_posterior(num_arms),
      private_posterior(num_arms),
      boost_counts(num_arms, 0),
      private_probs(num_arms, 0.0),
      scratch_stddevs(num_arms, 0.0),
      scratch_theta(num_arms, 0.0) {}

std::size_t select_leader(const PosteriorState& private_posterior,
                          double variance, RandomSource& rng) {
  const auto& means = private_posterior.empirical_means();
  const auto& counts = private_posterior.counts();
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (counts[a] == 0) {
      throw std::logic_error("select_leader: arm has no pulls");
    }
    const double s = std::sqrt(variance / static_cast<double>(counts[a]));
    const double v = means[a] + s * rng.normal();
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

std::size_t select_challenger_from(std::span<const double> optimal_probs,
                                   std::size_t leader, RandomSource& rng) {
  const std::size_t k = optimal_probs.size();
  if (k < 2) throw std::invalid_argument("select_challenger: need K >= 2");
  double mass = 0.0;
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    total += optimal_probs[a];
    if (a != leader) mass += optimal_probs[a];
  }
  const double u = rng.uniform();
  if (mass < 1e-12 * total) {
    auto pick = static_cast<std::size_t>(u * static_cast<double>(k - 1));
    if (pick >= k - 1) pick = k - 2;
    return pick >= leader ? pick + 1 : pick;
  }
  const double target = u * mass;
  double acc = 0.0;
  std::size_t last = leader == 0 ? 1 : 0;
  for (std::size_t a = 0; a < k; ++a) {
    if (a == leader || optimal_probs[a] <= 0.0) continue;
    acc += optimal_probs[a];
    last = a;
    if (target < acc) return a;
  }
  return last;
}

std::size_t select_challenger(const PosteriorState& private_posterior,
                              double variance, std::size_t leader,
                              RandomSource& rng) {
  const GaussianBeliefs beliefs = beliefs_from(private_posterior, variance);
  std::vector<double> probs(beliefs.size());
  optimal_arm_probabilities_into(beliefs.means, beliefs.stddevs,
                                 default_quadrature(), probs);
  return select_challenger_from(probs, leader, rng);
}

std::size_t ids_choice(std::size_t leader, std::size_t challenger,
                       std::span<const std::uint64_t> counts, RandomSource& rng) {
  const auto nl = static_cast<double>(counts[leader]);
  const auto nc = static_cast<double>(counts[challenger]);
  if (nl + nc == 0.0) {
    throw std::invalid_argument("ids_choice: both arms have zero pulls");
  }
  return rng.uniform() < nc / (nc + nl) ? leader : challenger;
}

StoppingDecision check_stopping(const PosteriorState& private_posterior,
                                double variance, double delta,
                                const QuadratureRule& rule) {
  const GaussianBeliefs beliefs = beliefs_from(private_posterior, variance);
  const SimplexDistribution probs = optimal_arm_probabilities(beliefs, rule);
  const std::size_t best = argmax(probs.view());
  return {probs[best] >= 1.0 - delta, best, probs[best]};
}

void initialize_agent(AgentState& state, const BanditInstance& instance,
                      const AgentConfig& config, AgentStreams& streams,
                      std::vector<StepRecord>* records) {
  config.validate(instance.num_arms());
  if (!(instance.variance() > 0.0)) {
    throw std::invalid_argument("agent requires a positive reward variance");
  }
  for (std::uint64_t r = 0; r < config.init_pulls_per_arm; ++r) {
    for (std::size_t a = 0; a < instance.num_arms(); ++a) {
      pull(state, instance, streams, a);
      StepRecord rec;
      rec.step = state.step;
      rec.leader = rec.challenger = rec.boosted = rec.pulled = a;
      rec.forced = true;
      after_pull(state, instance, config, rec);
      if (records) records->push_back(std::move(rec));
    }
  }
}

void agent_step(AgentState& state, const BanditInstance& instance,
                const AgentConfig& config, AgentStreams& streams,
                StepRecord& record) {
  const std::size_t k = instance.num_arms();
  if (!state.private_posterior.all_pulled()) {
    throw std::logic_error("agent_step: initialization not completed");
  }
  const double variance = instance.variance();

  std::size_t leader, challenger, target;
  if (config.schedule == BoostSchedule::round_robin_suboptimal) {
    target = round_robin_target(state, instance, config);
    leader = challenger = target;
  } else {
    if (!state.private_probs_valid) refresh_private_probs(state, variance);
    leader = select_leader(state.private_posterior, variance, streams.selection);
    if (config.challenger_rule == ChallengerRule::rejection) {
      challenger = leader;
      for (std::uint64_t i = 0;
           i < config.mc_samples_for_selection && challenger == leader; ++i) {
        challenger = select_leader(state.private_posterior, variance,
                                   streams.selection);
      }
      if (challenger == leader) {
        challenger = select_challenger_from(state.private_probs, leader,
                                            streams.selection);
      }
    } else {
      challenger = select_challenger_from(state.private_probs, leader,
                                          streams.selection);
    }
    target = ids_choice(leader, challenger, state.private_posterior.counts(),
                        streams.selection);
  }

  record.reference_probs.resize(k);
  record.boosted_probs.resize(k);
  state.public_posterior.posterior_stddevs(variance, state.scratch_stddevs);
  optimal_arm_probabilities_into(state.public_posterior.empirical_means(),
                                 state.scratch_stddevs, default_quadrature(),
                                 record.reference_probs);
  record.kl_spent = boost_into(record.reference_probs, target, config.epsilon,
                               config.solver, record.boosted_probs);
  const std::size_t arm =
      sample_index(record.boosted_probs, 1.0, streams.action.uniform());

  pull(state, instance, streams, arm);
  ++state.boost_counts[target];

  record.step = state.step;
  record.leader = leader;
  record.challenger = challenger;
  record.boosted = target;
  record.pulled = arm;
  record.forced = false;
  after_pull(state, instance, config, record);
}

StepRecord agent_step(AgentState& state, const BanditInstance& instance,
                      const AgentConfig& config, AgentStreams& streams) {
  StepRecord record;
  agent_step(state, instance, config, streams, record);
  return record;
}

EpisodeTrace run_episode(const BanditInstance& instance,
                         const AgentConfig& config, const RandomSource& rng) {
  AgentStreams streams(rng, instance.num_arms());
  EpisodeTrace trace{{}, std::nullopt, AgentState(instance.num_arms())};
  AgentState& state = trace.final_state;
  initialize_agent(state, instance, config, streams, &trace.steps);
  while (!state.stopped && state.step < config.max_steps) {
    trace.steps.push_back(agent_step(state, instance, config, streams));
  }
  trace.recommendation = state.recommendation;
  return trace;
}

void write_trace_header(std::ostream& os, std::size_t num_arms) {
  os << "seed,step,leader,challenger,boosted,pulled,error_prob,kl_spent";
  for (std::size_t a = 0; a < num_arms; ++a) os << ",n_" << a;
  for (std::size_t a = 0; a < num_arms; ++a) os << ",boost_" << a;
  os << '\n';
}

void write_trace_row(std::ostream& os, std::uint64_t seed,
                     const StepRecord& r,
                     std::span<const std::uint64_t> pulls,
                     std::span<const std::uint64_t> boosts) {
  char buf[64];
  os << seed << ',' << r.step << ',' << r.leader << ',' << r.challenger << ','
     << r.boosted << ',' << r.pulled << ',';
  std::snprintf(buf, sizeof buf, "%.12g", r.error_prob);
  os << buf << ',';
  std::snprintf(buf, sizeof buf, "%.12g", r.kl_spent);
  os << buf;
  for (auto n : pulls) os << ',' << n;
  for (auto n : boosts) os << ',' << n;
  os << '\n';
}

void write_trace_csv(std::ostream& os, std::uint64_t seed,
                     const EpisodeTrace& trace, std::size_t num_arms) {
  std::vector<std::uint64_t> pulls(num_arms, 0), boosts(num_arms, 0);
  for (const StepRecord& r : trace.steps) {
    ++pulls[r.pulled];
    if (!r.forced) ++boosts[r.boosted];
    write_trace_row(os, seed, r, pulls, boosts);
  }
}

}  // namespace deceptive
