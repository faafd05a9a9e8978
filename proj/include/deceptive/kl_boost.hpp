#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "deceptive/simplex.hpp"

namespace deceptive {

// Per-step KL budget: either a finite epsilon >= 0 or unconstrained.
class KlBudget {
 public:
  static KlBudget finite(double epsilon);
  static KlBudget unconstrained() { return KlBudget(); }

  bool is_unconstrained() const { return unconstrained_; }
  // Epsilon; +inf when unconstrained.
  double value() const;

  // "inf"/"unconstrained" or a decimal number.
  static KlBudget parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const KlBudget&, const KlBudget&) = default;

 private:
  KlBudget() = default;
  explicit KlBudget(double e) : unconstrained_(false), epsilon_(e) {}

  bool unconstrained_ = true;
  double epsilon_ = 0.0;
};

enum class BoostSolver {
  exact,        // bisection on the Bernoulli reduction
  approximate,  // Lambert-W underestimator q-hat
};

// d_KL(Ber(q) || Ber(p)) with 0 log 0 = 0. Requires 0 < p < 1, 0 <= q <= 1.
double bernoulli_kl(double q, double p);

// Largest q >= p with d_KL(Ber(q) || Ber(p)) <= epsilon, by bisection on
// [p, 1] to absolute tolerance 1e-12. The returned q is always feasible.
// Requires 0 < p <= 1.
double boost_probability(double p, KlBudget budget);

// max{ eps / W(eps/p), p, p + sqrt(eps p (1-p)) }, clamped to <= 1. Both
// branches are feasible points, so this never exceeds boost_probability.
// Requires 0 < p < 1 and epsilon > 0.
double boost_probability_approx(double p, double epsilon);

struct BoostSolution {
  double q_star;
  SimplexDistribution distribution;
  double achieved_kl;
};

// Maximizes the target arm's probability inside the KL ball around
// `reference`. The target gets q*, the other arms keep their reference
// proportions. Throws InfeasibleBoost when reference[target] == 0.
BoostSolution boost_distribution(const SimplexDistribution& reference,
                                 std::size_t target, KlBudget budget,
                                 BoostSolver solver = BoostSolver::exact);

// Allocation-free variant writing the boosted vector into `out`; returns the
// achieved Bernoulli KL. With a zero budget `out` is a bitwise copy of
// `reference`.
double boost_into(std::span<const double> reference, std::size_t target,
                  KlBudget budget, BoostSolver solver, std::span<double> out);

}  // namespace deceptive
