#include "deceptive/kl_boost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "deceptive/errors.hpp"
#include "deceptive/lambert_w.hpp"

namespace deceptive {

KlBudget KlBudget::finite(double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("KL budget must be nonnegative");
  }
  if (std::isinf(epsilon)) return unconstrained();
  return KlBudget(epsilon);
}

double KlBudget::value() const {
  return unconstrained_ ? std::numeric_limits<double>::infinity() : epsilon_;
}

KlBudget KlBudget::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "unconstrained") {
    return unconstrained();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid KL budget '" + text + "'");
  }
  if (used != text.size()) {
    throw std::invalid_argument("invalid KL budget '" + text + "'");
  }
  return finite(v);
}

std::string KlBudget::to_string() const {
  if (unconstrained_) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << epsilon_;
  return os.str();
}

double bernoulli_kl(double q, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("bernoulli_kl: p must lie in (0, 1)");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("bernoulli_kl: q must lie in [0, 1]");
  }
  double kl = 0.0;
  if (q > 0.0) kl += q * (std::log(q) - std::log(p));
  if (q < 1.0) kl += (1.0 - q) * (std::log1p(-q) - std::log1p(-p));
  return std::max(kl, 0.0);
}

double boost_probability(double p, KlBudget budget) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("boost_probability: p must lie in (0, 1]");
  }
  if (p == 1.0 || budget.is_unconstrained()) return 1.0;
  const double eps = budget.value();
  if (eps == 0.0) return p;
  if (eps >= -std::log(p)) return 1.0;

  // KL(q, p) is strictly increasing on [p, 1]; lo stays feasible.
  double lo = p;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (bernoulli_kl(mid, p) <= eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double boost_probability_approx(double p, double epsilon) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("boost_probability_approx: p must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("boost_probability_approx: epsilon must be > 0");
  }
  const double lambert_branch = epsilon / lambert_w(epsilon / p);
  const double chi2_branch = p + std::sqrt(epsilon * p * (1.0 - p));
  const double q = std::max({lambert_branch, p, chi2_branch});
  return std::min(q, 1.0);
}

double boost_into(std::span<const double> reference, std::size_t target,
                  KlBudget budget, BoostSolver solver, std::span<double> out) {
  const std::size_t k = reference.size();
  if (target >= k) throw std::out_of_range("boost target out of range");
  if (out.size() != k) throw std::invalid_argument("boost_into: size mismatch");
  const double p = reference[target];
  if (!(p > 0.0)) {
    throw InfeasibleBoost("cannot boost an arm with zero reference probability");
  }
  std::copy(reference.begin(), reference.end(), out.begin());
  if (!budget.is_unconstrained() && budget.value() == 0.0) return 0.0;

  double rest = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j != target) rest += reference[j];
  }
  if (rest <= 0.0 || p >= 1.0) return 0.0;

  double q;
  if (solver == BoostSolver::approximate && !budget.is_unconstrained()) {
    q = boost_probability_approx(p, budget.value());
  } else {
    q = boost_probability(p, budget);
  }
  const double scale = (1.0 - q) / rest;
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = (j == target) ? q : reference[j] * scale;
  }
  return bernoulli_kl(q, p);
}

BoostSolution boost_distribution(const SimplexDistribution& reference,
                                 std::size_t target, KlBudget budget,
                                 BoostSolver solver) {
  std::vector<double> out(reference.size());
  const double kl = boost_into(reference.view(), target, budget, solver, out);
  const double q = out[target];
  return BoostSolution{q, SimplexDistribution(std::move(out)), kl};
}

}  // namespace deceptive
