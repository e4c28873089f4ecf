#pragma once

#include <cstddef>
#include <vector>

namespace roentgen {

/// Gauss-Hermite rule for the standard normal weight exp(-z^2/2)/sqrt(2 pi):
/// sum_i w_i f(z_i) ~ E[f(Z)], Z ~ N(0, 1). Weights sum to 1; exact for
/// polynomials of degree <= 2 order - 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes from the symmetric Jacobi matrix (Golub-Welsch), polished by Newton
/// steps on the orthonormal recurrence; weights from the Christoffel sum.
/// Rules are cached per order.
const GaussHermiteRule &gauss_hermite(std::size_t order);

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t order);

} // namespace roentgen
