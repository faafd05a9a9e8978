#include "vector_math.hpp"

#include <cmath>

#if defined(DECEPTIVE_HAVE_LIBMVEC) && defined(__x86_64__)
#include <immintrin.h>

extern "C" __m256d _ZGVdN4v_erfc(__m256d);
extern "C" __m256d _ZGVdN4v_exp(__m256d);
#define DECEPTIVE_VECTOR_MATH 1
#endif

namespace deceptive::detail {
namespace {

#ifdef DECEPTIVE_VECTOR_MATH
const bool kUseVector = __builtin_cpu_supports("avx2");

template <__m256d (*F)(__m256d)>
__attribute__((target("avx2"))) void apply4(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, F(_mm256_loadu_pd(x + i)));
  if (i < n) {
    double tail[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t t = 0; i + t < n; ++t) tail[t] = x[i + t];
    _mm256_storeu_pd(tail, F(_mm256_loadu_pd(tail)));
    for (std::size_t t = 0; i + t < n; ++t) x[i + t] = tail[t];
  }
}
#else
constexpr bool kUseVector = false;
#endif

}  // namespace

bool vector_math_active() { return kUseVector; }

void erfc_inplace(double* x, std::size_t n) {
#ifdef DECEPTIVE_VECTOR_MATH
  if (kUseVector) return apply4<_ZGVdN4v_erfc>(x, n);
#endif
  for (std::size_t i = 0; i < n; ++i) x[i] = std::erfc(x[i]);
}

void exp_inplace(double* x, std::size_t n) {
#ifdef DECEPTIVE_VECTOR_MATH
  if (kUseVector) return apply4<_ZGVdN4v_exp>(x, n);
#endif
  for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(x[i]);
}

}  // namespace deceptive::detail
