#include "deceptive/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace deceptive {

double lambert_w(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("lambert_w: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  constexpr int kMaxIterations = 64;
  if (x > std::numbers::e) {
    // Newton on w + log w = log x, which avoids overflowing e^w.
    const double lx = std::log(x);
    double w = lx - std::log(lx);
    for (int it = 0; it < kMaxIterations; ++it) {
      const double f = w + std::log(w) - lx;
      const double step = f / (1.0 + 1.0 / w);
      w -= step;
      if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * w) break;
    }
    return w;
  }
  // Halley on w e^w - x from a log1p start.
  double w = std::log1p(x);
  if (x < 0.25) w = x * (1.0 - x);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(w)) {
      break;
    }
  }
  return w;
}

}  // namespace deceptive
