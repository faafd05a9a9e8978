#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "deceptive/bandit.hpp"
#include "deceptive/simplex.hpp"

namespace deceptive {

// Public and private suboptimality gaps of an instance whose best public arm
// (i*) differs from its best private arm.
struct GapStructure {
  std::vector<double> private_gaps;  // mu_priv[best_private] - mu_priv[a]
  std::vector<double> public_gaps;   // mu_pub[best_public] - mu_pub[a]
  std::size_t best_private = 0;
  std::size_t best_public = 0;
  double delta_istar_priv = 0.0;  // private gap of i*
  double d1 = 0.0;                // public gap of the best private arm

  std::size_t num_arms() const { return private_gaps.size(); }
  // Arms other than i*, ascending; the coordinates of a boosting allocation.
  std::vector<std::size_t> allocation_arms() const;
  // Arms outside {best_private, i*}, ascending.
  std::vector<std::size_t> competing_arms() const;
};

// Throws UnsupportedInstance when the best public and best private arms
// coincide, std::invalid_argument when either maximizer is not unique.
GapStructure gap_structure(const BanditInstance& instance);
GapStructure gap_structure(std::span<const double> public_means,
                           std::span<const double> private_means);

// Error-exponent functional over boosting proportions indexed like
// gaps.allocation_arms(): the minimum of
//   sqrt(w1 wa) Da^2 / (sqrt(w1) da + sqrt(wa) d1)   for a outside {1, i*}
//   sqrt(w1) D^2 / d1                                 (the i* term)
// and zero when w1 = 0. Throws std::invalid_argument on dimension mismatch.
double gamma(std::span<const double> weights, const GapStructure& gaps);

// Individual terms of gamma in allocation_arms() order, with the i* term in
// the slot of the best private arm.
std::vector<double> gamma_terms(std::span<const double> weights,
                                const GapStructure& gaps);

// Proportions restricted to arms != i* from per-arm boost counts, in
// allocation_arms() order. All zero if no arm other than i* was boosted.
std::vector<double> boosting_proportions(std::span<const std::uint64_t> counts,
                                         const GapStructure& gaps);

enum class AllocationCase {
  interior,    // root of F lies below D^2/d1
  boundary,    // root clipped to D^2/d1
  degenerate,  // K = 2, single coordinate
};

const char* to_string(AllocationCase c);

struct AllocationSolution {
  std::vector<std::size_t> arms;  // arm index of each weight coordinate
  SimplexDistribution weights;    // w*, over arms != i*
  double gamma_star;
  double y_star;
  AllocationCase allocation_case;
  double residual;  // |F(y*)| at the unclipped root (0 if degenerate)
};

// Closed-form pieces of the maximin characterization. With Da the private gap
// and da the public gap of arm a:
//   g_a(x)   = sqrt(x) Da^2 / (da + sqrt(x) d1)
//   x_a(y)   = (y da / (Da^2 - y d1))^2,          0 <= y < Da^2 / d1
//   x_a'(y)  = 2 x_a(y) (1/y + d1 / (Da^2 - y d1))
//   F(y)     = 1 + sum_a x_a(y) - (y/2) sum_a x_a'(y)
double evidence_ratio(double x, double private_gap, double public_gap, double d1);
double inverse_evidence(double y, double private_gap, double public_gap,
                        double d1);
double inverse_evidence_derivative(double y, double private_gap,
                                   double public_gap, double d1);
double stationarity_residual(double y, const GapStructure& gaps);
// Upper end of F's domain, min_a Da^2 / d1 over competing arms.
double stationarity_domain_end(const GapStructure& gaps);

// Solves max_w gamma(w) via the root of F, clipping at D^2/d1.
// Throws NumericalFailure if |F(y*)| > 1e-8 in the interior case.
AllocationSolution solve_allocation(const GapStructure& gaps);

}  // namespace deceptive
