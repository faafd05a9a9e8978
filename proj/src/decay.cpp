#include "deceptive/decay.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace deceptive {
namespace {

double success_probability(const DecayProcessParams& p, std::uint64_t m) {
  return std::min(1.0, p.c / (static_cast<double>(m) + p.m0));
}

// Trials up to and including the next success, for success probability q.
std::uint64_t geometric_gap(double q, RandomSource& rng) {
  if (q >= 1.0) return 1;
  std::geometric_distribution<std::uint64_t> gap(q);
  return gap(rng.engine()) + 1;
}

}  // namespace

void DecayProcessParams::validate() const {
  if (!(c > 0.0)) throw std::invalid_argument("decay process: c must be > 0");
  if (!(c <= m0)) throw std::invalid_argument("decay process: need c <= m0");
  if (horizon == 0) throw std::invalid_argument("decay process: horizon >= 1");
}

SuccessTrace simulate_decay(const DecayProcessParams& params,
                            RandomSource& rng) {
  params.validate();
  SuccessTrace trace;
  trace.success_counts.resize(params.horizon + 1);
  std::uint32_t m = 0;
  trace.success_counts[0] = 0;
  for (std::uint64_t t = 0; t < params.horizon; ++t) {
    if (rng.uniform() < success_probability(params, m)) ++m;
    trace.success_counts[t + 1] = m;
  }
  return trace;
}

SuccessTrace simulate_decay_coupled(const DecayProcessParams& params,
                                    std::span<const double> uniforms) {
  params.validate();
  if (uniforms.size() < params.horizon) {
    throw std::invalid_argument("simulate_decay_coupled: too few uniforms");
  }
  SuccessTrace trace;
  trace.success_counts.resize(params.horizon + 1);
  std::uint32_t m = 0;
  trace.success_counts[0] = 0;
  for (std::uint64_t t = 0; t < params.horizon; ++t) {
    if (uniforms[t] < success_probability(params, m)) ++m;
    trace.success_counts[t + 1] = m;
  }
  return trace;
}

SuccessTrace simulate_decay_jump(const DecayProcessParams& params,
                                 RandomSource& rng) {
  params.validate();
  SuccessTrace trace;
  trace.success_counts.assign(params.horizon + 1, 0);
  std::uint64_t t = 0;  // trials consumed so far
  std::uint32_t m = 0;
  while (true) {
    const std::uint64_t gap = geometric_gap(success_probability(params, m), rng);
    if (gap > params.horizon - t) break;
    for (std::uint64_t s = t + 1; s < t + gap; ++s) trace.success_counts[s] = m;
    t += gap;
    ++m;
    trace.success_counts[t] = m;
  }
  for (std::uint64_t s = t + 1; s <= params.horizon; ++s) {
    trace.success_counts[s] = m;
  }
  return trace;
}

std::uint64_t final_successes(const DecayProcessParams& params,
                              RandomSource& rng) {
  params.validate();
  std::uint64_t t = 0;
  std::uint64_t m = 0;
  while (true) {
    const std::uint64_t gap = geometric_gap(success_probability(params, m), rng);
    if (gap > params.horizon - t) return m;
    t += gap;
    ++m;
  }
}

std::uint64_t hitting_time(double c, double m0, std::uint64_t h,
                           RandomSource& rng) {
  DecayProcessParams p{c, m0, 1};
  p.validate();
  std::uint64_t t = 0;
  for (std::uint64_t i = 0; i < h; ++i) {
    t += geometric_gap(success_probability(p, i), rng);
  }
  return t;
}

double expected_hitting_time(double c, double m0, std::uint64_t h) {
  const double dh = static_cast<double>(h);
  return dh * (dh - 1.0) / (2.0 * c) + m0 * dh / c;
}

std::vector<std::uint64_t> final_successes_batch_serial(
    const DecayProcessParams& params, std::uint64_t seeds,
    const RandomSource& root) {
  std::vector<std::uint64_t> out(seeds);
  for (std::uint64_t s = 0; s < seeds; ++s) {
    RandomSource rng = root.substream(s);
    out[s] = final_successes(params, rng);
  }
  return out;
}

std::vector<std::uint64_t> final_successes_batch(const DecayProcessParams& params,
                                                 std::uint64_t seeds,
                                                 const RandomSource& root) {
  params.validate();
  std::vector<std::uint64_t> out(seeds);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(seeds); ++s) {
    RandomSource rng = root.substream(static_cast<std::uint64_t>(s));
    out[static_cast<std::size_t>(s)] = final_successes(params, rng);
  }
  return out;
}

double predicted_pulls(double epsilon, double variance, double gap,
                       double share, double t) {
  if (!(gap > 0.0)) {
    throw std::invalid_argument("predicted_pulls: gap must be > 0");
  }
  if (!(epsilon >= 0.0) || !(variance > 0.0) || !(share >= 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("predicted_pulls: invalid argument");
  }
  return std::sqrt(4.0 * epsilon * variance * share * t) / gap;
}

}  // namespace deceptive
