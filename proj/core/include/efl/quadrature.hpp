#pragma once

#include <vector>

namespace efl {

/// Gauss-Legendre rule on [-1, 1]: n nodes integrate polynomials up to
/// degree 2n-1 exactly; on analytic integrands the error decays faster
/// than any power of 1/n.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n from Chebyshev initial guesses;
/// weights w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2).
GaussLegendreRule gauss_legendre(int n);

}  // namespace efl
