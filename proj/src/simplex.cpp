#include "deceptive/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace deceptive {

bool is_simplex(std::span<const double> probs, double tol) {
  if (probs.empty()) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

SimplexDistribution::SimplexDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (!is_simplex(probs_)) {
    throw std::invalid_argument(
        "probabilities must be nonnegative and sum to one");
  }
}

SimplexDistribution SimplexDistribution::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty simplex");
  return SimplexDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SimplexDistribution SimplexDistribution::point_mass(std::size_t n,
                                                    std::size_t at) {
  if (at >= n) throw std::out_of_range("point mass index out of range");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return SimplexDistribution(std::move(p));
}

std::size_t SimplexDistribution::sample(double u) const {
  return sample_index(probs_, 1.0, u);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: size mismatch");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return kl;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t sample_index(std::span<const double> weights, double total,
                         double u) {
  const double target = u * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  // Rounding left target at or past the accumulated mass.
  return last_positive;
}

}  // namespace deceptive
