#include "deceptive/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deceptive/errors.hpp"

namespace deceptive {

QuadratureRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  constexpr double kPiToMinusQuarter = 0.7511255444649425;
  constexpr int kMaxIterations = 100;

  std::vector<double> x(n), w(n);
  const double dn = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    // Initial guesses for the largest roots, then extrapolation from the
    // previously converged ones.
    if (i == 0) {
      z = std::sqrt(2.0 * dn + 1.0) -
          1.85575 * std::pow(2.0 * dn + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double derivative = 0.0;
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
      // Orthonormal Hermite recurrence.
      double p1 = kPiToMinusQuarter;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (dj + 1.0)) * p2 -
             std::sqrt(dj / (dj + 1.0)) * p3;
      }
      derivative = std::sqrt(2.0 * dn) * p2;
      const double step = p1 / derivative;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericalFailure("gauss_hermite: Newton iteration did not converge");
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (derivative * derivative);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[half - 1] = 0.0;

  QuadratureRule rule;
  rule.nodes.assign(x.rbegin(), x.rend());
  rule.weights.assign(w.rbegin(), w.rend());
  return rule;
}

const QuadratureRule& default_quadrature() {
  static const QuadratureRule rule = gauss_hermite(kDefaultQuadratureNodes);
  return rule;
}

}  // namespace deceptive
