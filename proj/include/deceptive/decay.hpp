#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "deceptive/random.hpp"

namespace deceptive {

// Bernoulli trials whose success probability at step t is
// min(1, c / (M_t + m0)), M_t being the successes before step t.
struct DecayProcessParams {
  double c = 1.0;
  double m0 = 1.0;
  std::uint64_t horizon = 1;

  // Throws std::invalid_argument unless 0 < c <= m0 and horizon >= 1.
  void validate() const;
};

// success_counts[t] = successes among the first t trials, t = 0..horizon.
// Starts at 0; consecutive entries differ by 0 or 1.
struct SuccessTrace {
  std::vector<std::uint32_t> success_counts;

  std::uint32_t final_count() const { return success_counts.back(); }
};

// One uniform draw per step.
SuccessTrace simulate_decay(const DecayProcessParams& params, RandomSource& rng);

// Same process driven by caller-supplied uniforms (one per step); used for
// coupling arguments. uniforms.size() must be >= horizon.
SuccessTrace simulate_decay_coupled(const DecayProcessParams& params,
                                    std::span<const double> uniforms);

// Geometric-jump variant: samples inter-success gaps directly, O(M_T) draws.
// Equal in distribution to simulate_decay.
SuccessTrace simulate_decay_jump(const DecayProcessParams& params,
                                 RandomSource& rng);

// M_T only, via geometric jumps; no trace is materialized.
std::uint64_t final_successes(const DecayProcessParams& params,
                              RandomSource& rng);

// Step index (1-based) of the h-th success, T_h = sum of independent
// Geom(c / (i - 1 + m0)) gaps. No horizon applies.
std::uint64_t hitting_time(double c, double m0, std::uint64_t h,
                           RandomSource& rng);

// E[T_h] = h(h-1)/(2c) + m0 h / c.
double expected_hitting_time(double c, double m0, std::uint64_t h);

// M_T for seeds 0..n-1 drawn from root.substream(seed). OpenMP over seeds;
// the serial version is the reference and returns identical values.
std::vector<std::uint64_t> final_successes_batch(const DecayProcessParams& params,
                                                 std::uint64_t seeds,
                                                 const RandomSource& root);
std::vector<std::uint64_t> final_successes_batch_serial(
    const DecayProcessParams& params, std::uint64_t seeds,
    const RandomSource& root);

// Predicted boosted pull count sqrt(4 eps var share t) / gap for an arm that
// receives a `share` of the boosting effort. Throws on gap <= 0.
double predicted_pulls(double epsilon, double variance, double gap,
                       double share, double t);

}  // namespace deceptive
