#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deceptive {

// Probability vector over arms. Construction validates nonnegativity and a
// sum within 1e-9 of one.
class SimplexDistribution {
 public:
  explicit SimplexDistribution(std::vector<double> probs);

  static SimplexDistribution uniform(std::size_t n);
  static SimplexDistribution point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  std::span<const double> view() const { return probs_; }

  // Inverse-CDF draw from a uniform u in [0, 1).
  std::size_t sample(double u) const;

 private:
  std::vector<double> probs_;
};

inline constexpr double kSimplexTolerance = 1e-9;

bool is_simplex(std::span<const double> probs,
                double tol = kSimplexTolerance);

// Full-vector KL divergence sum_i p_i log(p_i / q_i) with 0 log 0 = 0.
// Returns +inf when p puts mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

// Inverse-CDF draw over unnormalized nonnegative weights summing to `total`.
std::size_t sample_index(std::span<const double> weights, double total,
                         double u);

}  // namespace deceptive
