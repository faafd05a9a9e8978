#pragma once

#include <cstddef>
#include <vector>

#include "deceptive/random.hpp"

namespace deceptive {

// Ground truth of one simulation: K arms, each with a public and a private
// Gaussian reward distribution sharing one variance.
//
// Invariants (checked on construction): K >= 2, equal lengths, variance >= 0,
// unique maximizer of both mean vectors. A zero variance is accepted so the
// degenerate reward limit is representable; posterior-based code rejects it.
class BanditInstance {
 public:
  BanditInstance(std::vector<double> public_means,
                 std::vector<double> private_means, double variance = 1.0);

  std::size_t num_arms() const { return public_means_.size(); }
  const std::vector<double>& public_means() const { return public_means_; }
  const std::vector<double>& private_means() const { return private_means_; }
  double variance() const { return variance_; }
  double stddev() const { return stddev_; }

  std::size_t best_public() const { return best_public_; }
  std::size_t best_private() const { return best_private_; }

 private:
  std::vector<double> public_means_;
  std::vector<double> private_means_;
  double variance_;
  double stddev_;
  std::size_t best_public_;
  std::size_t best_private_;
};

struct RewardPair {
  double public_reward;
  double private_reward;
};

// Independent draws X_pub ~ N(mu_pub[arm], var), X_priv ~ N(mu_priv[arm], var).
// Throws std::out_of_range for a bad arm index.
RewardPair sample_rewards(const BanditInstance& instance, std::size_t arm,
                          RandomSource& rng);

}  // namespace deceptive
