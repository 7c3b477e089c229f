#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pathmin {

namespace detail {
class ScIntegrand;
}

/// Piecewise-linear walk through (t_k, beta * W_k), k = 0..n, seen as the top
/// of the semi-infinite strip (0, 1) x (-inf, gamma(t)).
class WalkPolygon {
 public:
  /// Requires n >= 1, strictly increasing times from 0 to 1, W_0 = W_n = 0,
  /// finite values and beta >= 0. Throws std::invalid_argument otherwise.
  WalkPolygon(std::vector<double> times, std::vector<double> values, double beta = 1.0);

  /// All-zero walk on the given times.
  static WalkPolygon flat(std::vector<double> times);

  std::size_t edges() const { return times_.size() - 1; }
  std::size_t nodes() const { return times_.size(); }
  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }
  double beta() const { return beta_; }

  double time(std::size_t k) const { return times_[k]; }
  /// Scaled height beta * W_k.
  double height(std::size_t k) const { return beta_ * values_[k]; }
  std::complex<double> vertex(std::size_t k) const { return {times_[k], height(k)}; }
  /// Slope of edge k (from node k to k + 1) on the scaled walk.
  double slope(std::size_t k) const;
  double edge_length(std::size_t k) const;
  double min_height() const;

  WalkPolygon with_beta(double beta) const;
  /// t -> 1 - t.
  WalkPolygon time_reversed() const;
  /// W -> -W.
  WalkPolygon negated() const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  double beta_;
};

/// alpha_k for the finite vertices k = 0..n followed by 0 for the vertex at
/// infinity; the interior angle at a vertex is pi * alpha_k.
struct TurningAngles {
  std::vector<double> alpha;
  /// sum_k (1 - alpha_k), which equals 2 for a closed polygon.
  double angle_sum() const;
};

TurningAngles turning_angles(const WalkPolygon& poly);

enum class SolverKind { full, perturbative };
std::string_view to_string(SolverKind kind);
SolverKind solver_kind_from_string(std::string_view name);

enum class JacobianMode { analytic, finite_difference };

/// Pre-vertices z_0 = 0 < z_1 < ... < z_n = 1 on the real axis; the vertex at
/// infinity maps from infinity.
struct PreVertexSolution {
  std::vector<double> z;
  /// z_{k+1} - z_k to full relative precision, even where z has crowded.
  std::vector<double> gaps;
  double residual_norm = 0.0;
  SolverKind solver = SolverKind::full;
  double c_constant = 0.0;  ///< first-order c of the perturbative solver
  int iterations = 0;
};

nlohmann::json to_json(const PreVertexSolution& sol);
PreVertexSolution prevertex_solution_from_json(const nlohmann::json& j);

struct FullSolverOptions {
  double tolerance = 1e-8;     ///< required max relative side-length error
  int max_iterations = 200;
  std::size_t max_nodes = 128;
  int quadrature_order = 16;
  JacobianMode jacobian = JacobianMode::analytic;
  /// Used when it is a valid pre-vertex vector for the polygon.
  std::vector<double> initial_guess;
  /// Positive gaps, one per edge; takes precedence over initial_guess.
  std::vector<double> initial_gaps;
};

/// Raised when Newton stalls or runs out of iterations; carries the best
/// iterate.
class ScSolverError : public std::runtime_error {
 public:
  ScSolverError(const std::string& what, PreVertexSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const PreVertexSolution& best() const { return best_; }

 private:
  PreVertexSolution best_;
};

/// Solves the side-length conditions of the half-plane to strip map with
/// damped Newton in softmax gap variables.
PreVertexSolution solve_prevertices_full(const WalkPolygon& poly,
                                         const FullSolverOptions& options = {});

/// First-order small-beta pre-vertices around z_k = sin^2(pi t_k / 2).
PreVertexSolution solve_prevertices_perturbative(const WalkPolygon& poly);

PreVertexSolution solve_prevertices(const WalkPolygon& poly, SolverKind kind,
                                    const FullSolverOptions& options = {});

/// Max relative side-length error of the map defined by z.
double side_length_residual(const WalkPolygon& poly, std::span<const double> z,
                            int quadrature_order = 16);
/// Same, with pre-vertices given by their positive gaps.
double side_length_residual_gaps(const WalkPolygon& poly, std::span<const double> gaps,
                                 int quadrature_order = 16);

/// Gaps of an increasing pre-vertex vector.
std::vector<double> prevertex_gaps(std::span<const double> z);

/// The conformal map of the closed lower half-plane onto the region below the
/// walk, normalised by z_0 -> 0 and z_n -> 1. Throws std::invalid_argument for
/// Im z > 0.
class ScMap {
 public:
  ScMap(const WalkPolygon& poly, std::span<const double> z, int quadrature_order = 16);
  /// Uses sol.gaps when present.
  ScMap(const WalkPolygon& poly, const PreVertexSolution& sol, int quadrature_order = 16);

  std::complex<double> operator()(std::complex<double> z) const;
  std::complex<double> constant() const { return c_; }
  /// Image of pre-vertex k.
  std::complex<double> vertex_image(std::size_t k) const { return vertex_images_[k]; }

 private:
  void init(std::shared_ptr<detail::ScIntegrand> f);

  std::shared_ptr<const detail::ScIntegrand> integrand_;
  std::vector<std::complex<double>> vertex_images_;
  std::complex<double> c_;
};

std::complex<double> sc_forward_map(const PreVertexSolution& sol, const WalkPolygon& poly,
                                    std::complex<double> z);

/// Phi(Z) = -i (1 - Z) / (1 + Z), unit disk to lower half-plane. Throws
/// std::domain_error at Z = -1.
std::complex<double> mobius_disk_to_halfplane(std::complex<double> Z);

/// Half-plane pre-vertices from unit-circle pre-vertices listed clockwise (the
/// polygon's vertex order) with the vertex at infinity last: rotates that one
/// to -1, applies Phi and rescales so the first and last finite images become
/// 0 and 1. Throws std::invalid_argument if the result is not increasing.
std::vector<double> disk_to_halfplane_prevertices(std::span<const std::complex<double>> disk);

/// int_0^x ln|sin^2(pi s / 2) - sin^2(pi t / 2)| ds for x, t in [0, 1].
double log_sine_integral(double x, double t);

/// Max deviation of the two slope sums that rebuild the heights at every node.
double telescoping_residual(const WalkPolygon& poly);

}  // namespace pathmin
