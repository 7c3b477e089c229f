#include "pathmin/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pathmin {

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw std::invalid_argument("Jacobi exponents must exceed -1");
  }
  const double s = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  diag(0) = (beta - alpha) / (s + 2.0);
  for (int k = 1; k < n; ++k) {
    const double kk = k;
    const double m = 2.0 * kk + s;
    diag(k) = (beta * beta - alpha * alpha) / (m * (m + 2.0));
    double b2;
    if (k == 1) {
      // (k + s) / (2k + s - 1) cancels analytically at k = 1.
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      b2 = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + s) / (m * m * (m + 1.0) * (m - 1.0));
    }
    sub(k - 1) = std::sqrt(b2);
  }

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double log_mu0 = (s + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                         std::lgamma(beta + 1.0) - std::lgamma(s + 2.0);
  const double mu0 = std::exp(log_mu0);
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Golub-Welsch eigen-decomposition failed");
  }
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

}  // namespace pathmin
