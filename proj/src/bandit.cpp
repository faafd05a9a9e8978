#include "deceptive/bandit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deceptive {
namespace {

std::size_t unique_argmax(const std::vector<double>& v, const char* what) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != best && v[i] == v[best]) {
      throw std::invalid_argument(std::string(what) +
                                  " must have a unique maximizer");
    }
  }
  return best;
}

}  // namespace

BanditInstance::BanditInstance(std::vector<double> public_means,
                               std::vector<double> private_means,
                               double variance)
    : public_means_(std::move(public_means)),
      private_means_(std::move(private_means)),
      variance_(variance),
      stddev_(std::sqrt(variance)) {
  if (public_means_.size() < 2) {
    throw std::invalid_argument("bandit instance needs at least two arms");
  }
  if (public_means_.size() != private_means_.size()) {
    throw std::invalid_argument(
        "public_means and private_means must have equal length");
  }
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("variance must be finite and nonnegative");
  }
  for (std::size_t a = 0; a < public_means_.size(); ++a) {
    if (!std::isfinite(public_means_[a]) || !std::isfinite(private_means_[a])) {
      throw std::invalid_argument("means must be finite");
    }
  }
  best_public_ = unique_argmax(public_means_, "public_means");
  best_private_ = unique_argmax(private_means_, "private_means");
}

RewardPair sample_rewards(const BanditInstance& instance, std::size_t arm,
                          RandomSource& rng) {
  if (arm >= instance.num_arms()) {
    throw std::out_of_range("arm index " + std::to_string(arm) +
                            " out of range");
  }
  const double s = instance.stddev();
  const double pub = rng.normal();
  const double priv = rng.normal();
  return {instance.public_means()[arm] + s * pub,
          instance.private_means()[arm] + s * priv};
}

}  // namespace deceptive
