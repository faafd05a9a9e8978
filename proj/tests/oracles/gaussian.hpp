#pragma once

// Test-side reference computations for Gaussian optimal-arm probabilities,
// independent of the library's Gauss-Hermite code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <random>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace oracle {

inline long double normal_cdf(long double z) {
  return 0.5L * std::erfc(-z / std::sqrt(2.0L));
}

namespace detail {

struct MaxIntegrand {
  const std::vector<double>& mu;
  const std::vector<double>& sd;
  std::size_t a;

  long double operator()(long double x) const {
    const long double inv_sqrt_2pi = 0.398942280401432677939946L;
    const long double z = (x - mu[a]) / sd[a];
    long double f = inv_sqrt_2pi / sd[a] * std::exp(-0.5L * z * z);
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (j != a) f *= normal_cdf((x - mu[j]) / sd[j]);
    }
    return f;
  }
};

template <class F>
long double adaptive_simpson(const F& f, long double a, long double b,
                             long double fa, long double fm, long double fb,
                             long double whole, long double tol, int depth) {
  const long double m = 0.5L * (a + b);
  const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
  const long double flm = f(lm), frm = f(rm);
  const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
  const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
  const long double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0L * tol) {
    return left + right + diff / 15.0L;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

// P(X_a is the max) by adaptive Simpson in long double over x in
// mu_a +/- 14 sd_a, started from a uniform split fine enough to see the
// sharpest CDF. `rel_tol` is relative to the integrand scale 1 / sd_a.
inline std::vector<double> max_probabilities_simpson(const std::vector<double>& mu,
                                                     const std::vector<double>& sd,
                                                     long double rel_tol = 1e-14L) {
  const std::size_t k = mu.size();
  long double sd_min = sd[0];
  for (double s : sd) sd_min = std::min<long double>(sd_min, s);
  std::vector<double> out(k);
  for (std::size_t a = 0; a < k; ++a) {
    const detail::MaxIntegrand f{mu, sd, a};
    const long double lo = mu[a] - 14.0L * sd[a];
    const long double hi = mu[a] + 14.0L * sd[a];
    const int pieces =
        static_cast<int>(std::min<long double>(200000.0L, 4.0L * (hi - lo) / sd_min)) + 16;
    const long double h = (hi - lo) / pieces;
    long double total = 0.0L;
    for (int i = 0; i < pieces; ++i) {
      const long double x0 = lo + h * i, x1 = x0 + h, xm = 0.5L * (x0 + x1);
      const long double f0 = f(x0), fm = f(xm), f1 = f(x1);
      const long double whole = h / 6.0L * (f0 + 4.0L * fm + f1);
      total += detail::adaptive_simpson(f, x0, x1, f0, fm, f1, whole,
                                        rel_tol / (sd[a] * pieces), 30);
    }
    out[a] = static_cast<double>(total);
  }
  return out;
}

// Two arms in closed form: P(X_0 > X_1) = Phi((mu_0 - mu_1) / sqrt(s0^2 + s1^2)).
inline double two_arm_probability(double m0, double m1, double s0, double s1) {
  return static_cast<double>(
      normal_cdf((static_cast<long double>(m0) - m1) /
                 std::sqrt(static_cast<long double>(s0) * s0 +
                           static_cast<long double>(s1) * s1)));
}

// Plain Monte-Carlo frequencies: Mersenne Twister with Boost's ziggurat
// normal sampler, so it shares no sampling code with the library.
inline std::vector<double> max_probabilities_mc(const std::vector<double>& mu,
                                                const std::vector<double>& sd,
                                                std::uint64_t samples,
                                                std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  boost::random::normal_distribution<double> z(0.0, 1.0);
  const std::size_t k = mu.size();
  std::vector<std::uint64_t> wins(k, 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::size_t best = 0;
    double best_v = -INFINITY;
    for (std::size_t a = 0; a < k; ++a) {
      const double v = mu[a] + sd[a] * z(gen);
      if (v > best_v) {
        best_v = v;
        best = a;
      }
    }
    ++wins[best];
  }
  std::vector<double> out(k);
  for (std::size_t a = 0; a < k; ++a) {
    out[a] = static_cast<double>(wins[a]) / static_cast<double>(samples);
  }
  return out;
}

}  // namespace oracle
