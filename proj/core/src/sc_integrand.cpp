#include "sc_integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pathmin::detail {

std::complex<double> log_lower(std::complex<double> w) {
  double arg = std::atan2(w.imag(), w.real());
  if (arg > 0.0) {
    if (w.imag() > 0.0) throw std::invalid_argument("point lies in the upper half-plane");
    arg = -std::numbers::pi;
  }
  return {std::log(std::abs(w)), arg};
}

ScIntegrand::ScIntegrand(std::vector<double> exponents, int order)
    : a_(std::move(exponents)), legendre_(gauss_legendre(std::max(4, order * 3 / 4))) {
  if (a_.size() < 2) throw std::invalid_argument("need at least two pre-vertices");
  jacobi_.reserve(a_.size());
  for (double a : a_) {
    if (!(a > -1.0)) throw std::invalid_argument("vertex exponent must exceed -1");
    jacobi_.push_back(gauss_jacobi(order, 0.0, a));
  }
}

void ScIntegrand::set_prevertices(std::span<const double> z) {
  if (z.size() != a_.size()) throw std::invalid_argument("pre-vertex count mismatch");
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!(z[i] > z[i - 1])) throw std::invalid_argument("pre-vertices must increase strictly");
  }
  z_.assign(z.begin(), z.end());
  gaps_.resize(z.size() - 1);
  for (std::size_t i = 0; i < gaps_.size(); ++i) gaps_[i] = z[i + 1] - z[i];
}

void ScIntegrand::set_gaps(std::span<const double> gaps) {
  if (gaps.size() + 1 != a_.size()) throw std::invalid_argument("gap count mismatch");
  for (double g : gaps) {
    if (!(g > 0.0)) throw std::invalid_argument("pre-vertex gaps must be positive");
  }
  gaps_.assign(gaps.begin(), gaps.end());
  z_.resize(a_.size());
  z_[0] = 0.0;
  for (std::size_t i = 0; i < gaps_.size(); ++i) z_[i + 1] = z_[i] + gaps_[i];
}

void ScIntegrand::offsets_from(std::size_t j, std::vector<double>& offsets) const {
  offsets.resize(a_.size());
  offsets[j] = 0.0;
  for (std::size_t m = j; m-- > 0;) offsets[m] = offsets[m + 1] + gaps_[m];
  for (std::size_t m = j + 1; m < a_.size(); ++m) offsets[m] = offsets[m - 1] - gaps_[m - 1];
}

void ScIntegrand::edge_integrals(std::vector<double>& out, Eigen::MatrixXd* jacobian,
                                 std::vector<double>* gap_diagonal) const {
  if (z_.empty()) throw std::logic_error("pre-vertices not set");
  const std::size_t n = edges();
  const std::size_t nodes = a_.size();
  out.assign(n, 0.0);
  if (jacobian) jacobian->setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + 1));
  if (gap_diagonal) gap_diagonal->assign(n, 0.0);
  std::vector<double> off;
  // Nodes of one half edge as (distance r from the singular end, weight).
  std::vector<std::pair<double, double>> quad;
  for (std::size_t k = 0; k < n; ++k) {
    const double h = gaps_[k];
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      const std::size_t j = side == 0 ? k : k + 1;
      const double dir = side == 0 ? 1.0 : -1.0;
      const double a = a_[j];
      offsets_from(j, off);
      const double length = 0.5 * h;
      double neighbour = h;
      if (side == 0 && k > 0) neighbour = std::min(neighbour, gaps_[k - 1]);
      if (side == 1 && k + 1 < n) neighbour = std::min(neighbour, gaps_[k + 1]);

      quad.clear();
      const double first = std::min(length, 0.5 * neighbour);
      const double scale = std::pow(0.5 * first, a + 1.0);
      const auto& gj = jacobi_[j];
      for (std::size_t i = 0; i < gj.size(); ++i) {
        quad.emplace_back(0.5 * first * (1.0 + gj.nodes[i]), gj.weights[i] * scale);
      }
      double pos = first;
      while (pos < length) {
        double nearest = pos;
        for (std::size_t m = 0; m < nodes; ++m) {
          if (m != j) nearest = std::min(nearest, std::abs(dir * pos + off[m]));
        }
        double len = std::min(length - pos, 0.5 * nearest);
        if (length - pos - len < 1e-3 * len) len = length - pos;
        for (std::size_t i = 0; i < legendre_.size(); ++i) {
          const double r = pos + 0.5 * len * (1.0 + legendre_.nodes[i]);
          quad.emplace_back(r, legendre_.weights[i] * 0.5 * len * std::pow(r, a));
        }
        pos += len;
      }

      for (const auto& [r, w] : quad) {
        const double x = dir * r;  // x - z_j
        double log_mag = 0.0;
        for (std::size_t m = 0; m < nodes; ++m) {
          if (m == j || a_[m] == 0.0) continue;
          log_mag += a_[m] * std::log(std::abs(x + off[m]));
        }
        const double fx = w * std::exp(log_mag);
        total += fx;
        if (!jacobian && !gap_diagonal) continue;
        double q_left = 0.0;
        double q_right = 0.0;
        for (std::size_t m = 0; m < nodes; ++m) {
          if (m == k || m == k + 1 || a_[m] == 0.0) continue;
          const double qm = a_[m] / (x + off[m]);
          (m < k ? q_left : q_right) += qm;
          if (jacobian) (*jacobian)(k, m) -= fx * qm;
        }
        // s and 1 - s from the nearer end keep full relative precision.
        const double s = side == 0 ? r / h : 1.0 - r / h;
        const double s_bar = side == 0 ? 1.0 - r / h : r / h;
        if (jacobian) {
          (*jacobian)(k, k) += fx * s_bar * (q_left + q_right);
          (*jacobian)(k, k + 1) += fx * s * (q_left + q_right);
        }
        if (gap_diagonal) (*gap_diagonal)[k] += fx * (s * q_left - s_bar * q_right);
      }
    }
    out[k] = total;
    const double p = (1.0 + a_[k] + a_[k + 1]) * total / h;
    if (jacobian) {
      (*jacobian)(k, k) -= p;
      (*jacobian)(k, k + 1) += p;
    }
    if (gap_diagonal) (*gap_diagonal)[k] += p;
  }
}

Eigen::MatrixXd gap_jacobian(const Eigen::MatrixXd& dz, std::span<const double> diagonal) {
  const Eigen::Index n = dz.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    // Gaps left of edge k move z_0..z_l against the rest: translation
    // invariance turns that into -sum_{m <= l} dI_k/dz_m.
    double left = 0.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      left += dz(k, l);
      g(k, l) = -left;
    }
    double right = 0.0;
    for (Eigen::Index l = n - 1; l > k; --l) {
      right += dz(k, l + 1);
      g(k, l) = right;
    }
    g(k, k) = diagonal[static_cast<std::size_t>(k)];
  }
  return g;
}

std::complex<double> ScIntegrand::edge_direction(std::size_t k) const {
  double s = 0.0;
  for (std::size_t m = k + 1; m < a_.size(); ++m) s += a_[m];
  return std::polar(1.0, -std::numbers::pi * s);
}

std::complex<double> ScIntegrand::integrate_from_prevertex(std::size_t j,
                                                           std::complex<double> d) const {
  const double r = std::abs(d);
  if (r == 0.0) return 0.0;
  if (d.imag() > 0.0) throw std::invalid_argument("point lies in the upper half-plane");
  const std::size_t nodes = a_.size();
  std::vector<double> off;
  offsets_from(j, off);
  // zeta - z_m = tau d + off[m] on the segment zeta = z_j + tau d.
  auto log_rest = [&](std::complex<double> rel) {
    std::complex<double> s = 0.0;
    for (std::size_t m = 0; m < nodes; ++m) {
      if (m == j || a_[m] == 0.0) continue;
      s += a_[m] * log_lower(rel + off[m]);
    }
    return s;
  };
  const double a = a_[j];
  double neighbour = std::numeric_limits<double>::infinity();
  if (j > 0) neighbour = gaps_[j - 1];
  if (j < gaps_.size()) neighbour = std::min(neighbour, gaps_[j]);

  // Singular panel: (zeta - z_j)^a = tau^a d^a.
  const double tau0 = std::min(1.0, 0.5 * neighbour / r);
  const std::complex<double> head = std::exp(a * log_lower(d)) * std::pow(0.5 * tau0, a + 1.0) * d;
  std::complex<double> sum = 0.0;
  const auto& gj = jacobi_[j];
  for (std::size_t i = 0; i < gj.size(); ++i) {
    sum += gj.weights[i] * std::exp(log_rest(0.5 * tau0 * (1.0 + gj.nodes[i]) * d));
  }
  sum *= head;

  double pos = tau0;
  while (pos < 1.0) {
    double dist = pos * r;
    for (std::size_t m = 0; m < nodes; ++m) {
      if (m != j) dist = std::min(dist, std::abs(pos * d + off[m]));
    }
    double len = std::min(1.0 - pos, 0.5 * dist / r);
    if (1.0 - pos - len < 1e-3 * len) len = 1.0 - pos;
    std::complex<double> panel = 0.0;
    for (std::size_t i = 0; i < legendre_.size(); ++i) {
      const double tau = pos + 0.5 * len * (1.0 + legendre_.nodes[i]);
      const std::complex<double> rel = tau * d;
      panel += legendre_.weights[i] * std::exp(a * log_lower(rel) + log_rest(rel));
    }
    sum += panel * 0.5 * len * d;
    pos += len;
  }
  return sum;
}

}  // namespace pathmin::detail
