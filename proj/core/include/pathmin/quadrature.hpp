#pragma once

#include <vector>

namespace pathmin {

/// Nodes and weights on [-1, 1], nodes ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss rule for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1],
/// alpha, beta > -1, computed by the Golub-Welsch eigenvalue method.
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

/// n-point Gauss-Legendre rule (alpha = beta = 0).
QuadratureRule gauss_legendre(int n);

}  // namespace pathmin
