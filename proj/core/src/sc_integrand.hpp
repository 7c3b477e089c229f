#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pathmin/quadrature.hpp"

namespace pathmin::detail {

/// The Schwarz-Christoffel integrand prod_m (zeta - z_m)^{a_m} for finite
/// pre-vertices z_0 < ... < z_n on the real axis (z at infinity omitted),
/// together with the quadratures the parameter problem and the forward map
/// need.
///
/// Distances between pre-vertices are summed from the gaps, so crowded
/// pre-vertices near 1 keep their relative spacing.
///
/// Integrals that start at a pre-vertex use one Gauss-Jacobi panel that
/// absorbs the endpoint power, sized to at most half the distance to the
/// nearest other pre-vertex, followed by Gauss-Legendre panels no longer than
/// half the distance from their start to the nearest pre-vertex.
class ScIntegrand {
 public:
  ScIntegrand(std::vector<double> exponents, int order);

  void set_prevertices(std::span<const double> z);
  /// z_k = sum of the first k gaps; the gaps are kept as given.
  void set_gaps(std::span<const double> gaps);

  std::span<const double> prevertices() const { return z_; }
  std::span<const double> gaps() const { return gaps_; }
  std::span<const double> exponents() const { return a_; }
  std::size_t edges() const { return a_.size() - 1; }

  /// I_k = int_{z_k}^{z_{k+1}} |f(x)| dx for each edge k. When jacobian is
  /// non-null it receives dI_k / dz_m as an edges x (edges + 1) matrix, and
  /// gap_diagonal receives dI_k / dg_k with z_0..z_k fixed and the pre-vertices
  /// right of edge k moving rigidly.
  void edge_integrals(std::vector<double>& out, Eigen::MatrixXd* jacobian = nullptr,
                      std::vector<double>* gap_diagonal = nullptr) const;

  /// Direction e^{i theta_k} of edge k under the branch arg in [-pi, 0].
  std::complex<double> edge_direction(std::size_t k) const;

  /// int_{z_j}^{z_j + d} f(zeta) d zeta along the straight segment, for
  /// z_j + d in the closed lower half-plane.
  std::complex<double> integrate_from_prevertex(std::size_t j, std::complex<double> d) const;

 private:
  /// offsets[m] = z_j - z_m summed over gaps.
  void offsets_from(std::size_t j, std::vector<double>& offsets) const;

  std::vector<double> a_;
  std::vector<double> z_;
  std::vector<double> gaps_;
  std::vector<QuadratureRule> jacobi_;  ///< per pre-vertex, weight (1+u)^{a_j}
  QuadratureRule legendre_;
};

/// dI_k / dg_l from dI_k / dz_m and the diagonal from edge_integrals, with z_0
/// held fixed and z_m the sum of the first m gaps. Off the diagonal only
/// derivatives in non-endpoint pre-vertices are summed, so large terms from a
/// crowded pair never cancel against each other.
Eigen::MatrixXd gap_jacobian(const Eigen::MatrixXd& dz, std::span<const double> diagonal);

/// Principal log with the lower-half-plane convention arg in [-pi, 0]: real
/// negative numbers get arg = -pi.
std::complex<double> log_lower(std::complex<double> w);

}  // namespace pathmin::detail
