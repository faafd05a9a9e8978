#pragma once

#include <cstddef>
#include <vector>

namespace deceptive {

// Gauss-Hermite rule for integrals of the form \int e^{-x^2} f(x) dx.
// Nodes are sorted ascending and symmetric about zero; weights sum to sqrt(pi).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Roots of the degree-n Hermite polynomial by Newton refinement of asymptotic
// initial guesses. Throws NumericalFailure if a root does not converge.
QuadratureRule gauss_hermite(std::size_t n);

inline constexpr std::size_t kDefaultQuadratureNodes = 32;

// Shared 32-node rule, built once.
const QuadratureRule& default_quadrature();

}  // namespace deceptive
