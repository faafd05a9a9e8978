#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deceptive {

// Per-arm pull counts and running empirical means. Under an improper prior
// with known variance s^2 the posterior of arm a is N(mean_a, s^2 / N_a),
// defined once N_a >= 1.
class PosteriorState {
 public:
  explicit PosteriorState(std::size_t num_arms, bool keep_reward_log = false);

  std::size_t num_arms() const { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  const std::vector<double>& empirical_means() const { return means_; }
  std::uint64_t total() const { return total_; }
  bool all_pulled() const;

  void record(std::size_t arm, double reward);

  // Per-arm reward history; empty unless constructed with keep_reward_log.
  const std::vector<std::vector<double>>& reward_log() const { return log_; }

  // Posterior standard deviations sqrt(variance / N_a) written into `out`.
  // Requires all arms pulled.
  void posterior_stddevs(double variance, std::span<double> out) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> means_;
  std::uint64_t total_ = 0;
  bool keep_log_;
  std::vector<std::vector<double>> log_;
};

PosteriorState update_posterior(PosteriorState state, std::size_t arm,
                                double reward);

}  // namespace deceptive
