#pragma once

#include <cstdint>
#include <exception>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deceptive {

// Runs fn(seed) for seed = 0..n-1 and returns the results in seed order.
// Each call must only touch state it owns. The first exception (by seed
// index) is rethrown after all work finishes.
template <class Fn>
auto map_seeds(std::uint64_t n, int threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::uint64_t>> {
  using Result = std::invoke_result_t<Fn&, std::uint64_t>;
  std::vector<Result> out(n);
  std::vector<std::exception_ptr> errors(n);
#ifdef _OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
#else
  (void)threads;
#endif
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(n); ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    try {
      out[seed] = fn(seed);
    } catch (...) {
      errors[seed] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Serial reference for map_seeds.
template <class Fn>
auto map_seeds_serial(std::uint64_t n, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::uint64_t>> {
  std::vector<std::invoke_result_t<Fn&, std::uint64_t>> out;
  out.reserve(n);
  for (std::uint64_t s = 0; s < n; ++s) out.push_back(fn(s));
  return out;
}

}  // namespace deceptive
