#include "deceptive/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "deceptive/errors.hpp"

namespace deceptive {
namespace {

std::size_t unique_argmax(std::span<const double> v, const char* what) {
  std::size_t best = argmax(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != best && v[i] == v[best]) {
      throw std::invalid_argument(std::string(what) +
                                  " must have a unique maximizer");
    }
  }
  return best;
}

}  // namespace

std::vector<std::size_t> GapStructure::allocation_arms() const {
  std::vector<std::size_t> arms;
  for (std::size_t a = 0; a < num_arms(); ++a) {
    if (a != best_public) arms.push_back(a);
  }
  return arms;
}

std::vector<std::size_t> GapStructure::competing_arms() const {
  std::vector<std::size_t> arms;
  for (std::size_t a = 0; a < num_arms(); ++a) {
    if (a != best_public && a != best_private) arms.push_back(a);
  }
  return arms;
}

GapStructure gap_structure(std::span<const double> public_means,
                           std::span<const double> private_means) {
  if (public_means.size() != private_means.size() || public_means.size() < 2) {
    throw std::invalid_argument("gap_structure: need two equal-length mean vectors");
  }
  GapStructure g;
  g.best_public = unique_argmax(public_means, "public_means");
  g.best_private = unique_argmax(private_means, "private_means");
  if (g.best_public == g.best_private) {
    throw UnsupportedInstance(
        "best public and best private arms coincide; allocation undefined");
  }
  const std::size_t k = public_means.size();
  g.private_gaps.resize(k);
  g.public_gaps.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    g.private_gaps[a] = private_means[g.best_private] - private_means[a];
    g.public_gaps[a] = public_means[g.best_public] - public_means[a];
  }
  g.delta_istar_priv = g.private_gaps[g.best_public];
  g.d1 = g.public_gaps[g.best_private];
  return g;
}

GapStructure gap_structure(const BanditInstance& instance) {
  return gap_structure(instance.public_means(), instance.private_means());
}

std::vector<double> gamma_terms(std::span<const double> weights,
                                const GapStructure& gaps) {
  const auto arms = gaps.allocation_arms();
  if (weights.size() != arms.size()) {
    throw std::invalid_argument("gamma: weights must have dimension K-1");
  }
  double w1 = 0.0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i] == gaps.best_private) w1 = weights[i];
  }
  const double s1 = std::sqrt(std::max(w1, 0.0));
  std::vector<double> terms(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const std::size_t a = arms[i];
    if (a == gaps.best_private) {
      const double dd = gaps.delta_istar_priv;
      terms[i] = s1 * dd * dd / gaps.d1;
      continue;
    }
    const double sa = std::sqrt(std::max(weights[i], 0.0));
    const double da2 = gaps.private_gaps[a] * gaps.private_gaps[a];
    const double denom = s1 * gaps.public_gaps[a] + sa * gaps.d1;
    terms[i] = denom > 0.0 ? s1 * sa * da2 / denom : 0.0;
  }
  return terms;
}

double gamma(std::span<const double> weights, const GapStructure& gaps) {
  const auto terms = gamma_terms(weights, gaps);
  return *std::min_element(terms.begin(), terms.end());
}

std::vector<double> boosting_proportions(std::span<const std::uint64_t> counts,
                                         const GapStructure& gaps) {
  if (counts.size() != gaps.num_arms()) {
    throw std::invalid_argument("boosting_proportions: size mismatch");
  }
  const auto arms = gaps.allocation_arms();
  std::vector<double> w(arms.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    w[i] = static_cast<double>(counts[arms[i]]);
    total += w[i];
  }
  if (total > 0.0) {
    for (double& x : w) x /= total;
  }
  return w;
}

const char* to_string(AllocationCase c) {
  switch (c) {
    case AllocationCase::interior:
      return "interior";
    case AllocationCase::boundary:
      return "boundary";
    case AllocationCase::degenerate:
      return "degenerate";
  }
  return "unknown";
}

double evidence_ratio(double x, double private_gap, double public_gap,
                      double d1) {
  const double sx = std::sqrt(x);
  return sx * private_gap * private_gap / (public_gap + sx * d1);
}

double inverse_evidence(double y, double private_gap, double public_gap,
                        double d1) {
  const double root = y * public_gap / (private_gap * private_gap - y * d1);
  return root * root;
}

double inverse_evidence_derivative(double y, double private_gap,
                                   double public_gap, double d1) {
  const double x = inverse_evidence(y, private_gap, public_gap, d1);
  return 2.0 * x * (1.0 / y + d1 / (private_gap * private_gap - y * d1));
}

double stationarity_domain_end(const GapStructure& gaps) {
  double end = std::numeric_limits<double>::infinity();
  for (std::size_t a : gaps.competing_arms()) {
    end = std::min(end, gaps.private_gaps[a] * gaps.private_gaps[a] / gaps.d1);
  }
  return end;
}

double stationarity_residual(double y, const GapStructure& gaps) {
  // (y/2) x_a'(y) = x_a(y) Da^2 / (Da^2 - y d1), so
  // F(y) = 1 - sum_a x_a(y) y d1 / (Da^2 - y d1).
  double f = 1.0;
  for (std::size_t a : gaps.competing_arms()) {
    const double da2 = gaps.private_gaps[a] * gaps.private_gaps[a];
    const double x = inverse_evidence(y, gaps.private_gaps[a],
                                      gaps.public_gaps[a], gaps.d1);
    f -= x * y * gaps.d1 / (da2 - y * gaps.d1);
  }
  return f;
}

namespace {

double stationarity_slope(double y, const GapStructure& gaps) {
  double slope = 0.0;
  for (std::size_t a : gaps.competing_arms()) {
    const double da2 = gaps.private_gaps[a] * gaps.private_gaps[a];
    const double r = da2 - y * gaps.d1;
    const double x = inverse_evidence(y, gaps.private_gaps[a],
                                      gaps.public_gaps[a], gaps.d1);
    const double dx = inverse_evidence_derivative(y, gaps.private_gaps[a],
                                                  gaps.public_gaps[a], gaps.d1);
    // d/dy [x y d1 / r] = d1 (dx y / r + x / r + x y d1 / r^2)
    slope -= gaps.d1 * (dx * y / r + x / r + x * y * gaps.d1 / (r * r));
  }
  return slope;
}

}  // namespace

AllocationSolution solve_allocation(const GapStructure& gaps) {
  const auto arms = gaps.allocation_arms();
  const auto competing = gaps.competing_arms();
  const double clip = gaps.delta_istar_priv * gaps.delta_istar_priv / gaps.d1;

  if (competing.empty()) {
    AllocationSolution sol{arms, SimplexDistribution::point_mass(1, 0), 0.0,
                           clip, AllocationCase::degenerate, 0.0};
    sol.gamma_star = gamma(sol.weights.view(), gaps);
    return sol;
  }

  const double end = stationarity_domain_end(gaps);
  double lo = 0.0;
  double hi = end * (1.0 - 1e-9);
  if (stationarity_residual(hi, gaps) >= 0.0) {
    throw NumericalFailure("solve_allocation: F does not change sign");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (stationarity_residual(mid, gaps) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double root = std::abs(stationarity_residual(lo, gaps)) <=
                        std::abs(stationarity_residual(hi, gaps))
                    ? lo
                    : hi;
  // Newton polish inside the bracket; F is smooth and strictly decreasing.
  for (int it = 0; it < 8; ++it) {
    const double f = stationarity_residual(root, gaps);
    if (std::abs(f) <= 1e-14) break;
    const double next = root - f / stationarity_slope(root, gaps);
    if (!(next > 0.0 && next < end)) break;
    if (std::abs(stationarity_residual(next, gaps)) >= std::abs(f)) break;
    root = next;
  }
  const double residual = std::abs(stationarity_residual(root, gaps));

  AllocationCase kind = AllocationCase::interior;
  double y = root;
  if (root > clip) {
    kind = AllocationCase::boundary;
    y = clip;
  } else if (residual > 1e-8) {
    throw NumericalFailure("solve_allocation: |F(y*)| exceeds 1e-8");
  }

  std::vector<double> x(arms.size(), 0.0);
  double sum_x = 0.0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const std::size_t a = arms[i];
    if (a == gaps.best_private) continue;
    x[i] = inverse_evidence(y, gaps.private_gaps[a], gaps.public_gaps[a], gaps.d1);
    sum_x += x[i];
  }
  const double w1 = 1.0 / (1.0 + sum_x);
  std::vector<double> w(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) {
    w[i] = arms[i] == gaps.best_private ? w1 : x[i] * w1;
  }
  // Remove rounding drift so the simplex check holds exactly.
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;

  AllocationSolution sol{arms, SimplexDistribution(std::move(w)), 0.0, y, kind,
                         residual};
  sol.gamma_star = gamma(sol.weights.view(), gaps);
  return sol;
}

}  // namespace deceptive
