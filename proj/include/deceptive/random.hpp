#pragma once

#include <cstdint>
#include <random>

namespace deceptive {

// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seeded source of randomness. Identical seed and identical call sequence
// produce identical outputs. Substreams are derived deterministically from
// (seed, id) so that parallel work can be split without sharing state.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent stream keyed by `id`; does not advance this source.
  RandomSource substream(std::uint64_t id) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace deceptive
