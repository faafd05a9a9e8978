#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deceptive/posterior.hpp"
#include "deceptive/quadrature.hpp"
#include "deceptive/random.hpp"
#include "deceptive/simplex.hpp"

namespace deceptive {

// Independent Gaussian beliefs N(means[a], stddevs[a]^2) over arm values.
struct GaussianBeliefs {
  std::vector<double> means;
  std::vector<double> stddevs;

  std::size_t size() const { return means.size(); }
};

// Posterior beliefs of a fully-initialized PosteriorState.
GaussianBeliefs beliefs_from(const PosteriorState& posterior, double variance);

// Probabilities below this value are raised to it before renormalizing, so a
// boost target always has a strictly positive base probability.
inline constexpr double kProbabilityFloor = 1e-300;

// Probability that each arm's draw is the largest, by Gauss-Hermite quadrature
// of \int phi(x) prod_{j != a} Phi((mu_a - mu_j + s_a sqrt2 x) / s_j) dx.
// Floored at kProbabilityFloor and renormalized to sum to one.
// Throws std::invalid_argument on a nonpositive stddev, K < 2 or a rule with
// fewer than 8 nodes.
SimplexDistribution optimal_arm_probabilities(
    const GaussianBeliefs& beliefs,
    const QuadratureRule& rule = default_quadrature());

// Allocation-free form used on hot paths. Writes the floored, renormalized
// probabilities into `out` and returns the raw quadrature sum before
// renormalization (close to one in the well-resolved regime).
double optimal_arm_probabilities_into(std::span<const double> means,
                                      std::span<const double> stddevs,
                                      const QuadratureRule& rule,
                                      std::span<double> out);

// Raw (unfloored, unnormalized) quadrature values. Arm a is integrated with
// the Gauss-Hermite rule in its own variable while every competitor's stddev
// is at least s_a / 1.5; otherwise the Hermite integrand is step-like and
// arm a is integrated over the value axis with composite Gauss-Legendre
// panels anchored at each arm's mean and stddev.
void optimal_arm_probabilities_raw(std::span<const double> means,
                                   std::span<const double> stddevs,
                                   const QuadratureRule& rule,
                                   std::span<double> out);

// Gauss-Hermite for every arm regardless of resolution; kept to document
// and test the plain rule's behaviour.
void optimal_arm_probabilities_hermite(std::span<const double> means,
                                       std::span<const double> stddevs,
                                       const QuadratureRule& rule,
                                       std::span<double> out);

// Monte-Carlo estimate: empirical frequency with which each arm's draw is the
// maximum over `samples` independent joint draws (ties to the lowest index).
// Samples are processed in fixed blocks with per-block substreams of `rng`,
// so the OpenMP kernel and the serial reference return identical results for
// any thread count. `rng` is advanced by one draw.
SimplexDistribution optimal_arm_probabilities_mc(const GaussianBeliefs& beliefs,
                                                 std::uint64_t samples,
                                                 RandomSource& rng);

SimplexDistribution optimal_arm_probabilities_mc_serial(
    const GaussianBeliefs& beliefs, std::uint64_t samples, RandomSource& rng);

inline constexpr std::uint64_t kMonteCarloBlock = 1 << 16;

}  // namespace deceptive
