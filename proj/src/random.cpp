#include "deceptive/random.hpp"

namespace deceptive {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed)
    : seed_(seed), engine_(mix64(seed)) {}

RandomSource RandomSource::substream(std::uint64_t id) const {
  return RandomSource(mix64(seed_ ^ mix64(id + 0x632be59bd9b4e019ULL)));
}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::normal() { return normal_(engine_); }

}  // namespace deceptive
