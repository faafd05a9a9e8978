#include "deceptive/posterior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deceptive {

PosteriorState::PosteriorState(std::size_t num_arms, bool keep_reward_log)
    : counts_(num_arms, 0), means_(num_arms, 0.0), keep_log_(keep_reward_log) {
  if (keep_log_) log_.resize(num_arms);
}

bool PosteriorState::all_pulled() const {
  for (auto n : counts_) {
    if (n == 0) return false;
  }
  return true;
}

void PosteriorState::record(std::size_t arm, double reward) {
  if (arm >= counts_.size()) {
    throw std::out_of_range("arm index " + std::to_string(arm) +
                            " out of range");
  }
  const auto n = ++counts_[arm];
  means_[arm] += (reward - means_[arm]) / static_cast<double>(n);
  ++total_;
  if (keep_log_) log_[arm].push_back(reward);
}

void PosteriorState::posterior_stddevs(double variance,
                                       std::span<double> out) const {
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    if (counts_[a] == 0) {
      throw std::logic_error("posterior undefined for an unpulled arm");
    }
    out[a] = std::sqrt(variance / static_cast<double>(counts_[a]));
  }
}

PosteriorState update_posterior(PosteriorState state, std::size_t arm,
                                double reward) {
  state.record(arm, reward);
  return state;
}

}  // namespace deceptive
