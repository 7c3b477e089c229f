#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pathmin/quadrature.hpp"
#include "pathmin/sc_map.hpp"

namespace pathmin {

namespace {

constexpr double kPi = std::numbers::pi;

// y ln|y| - y, an antiderivative of ln|y|.
double xlogx(double y) { return y == 0.0 ? 0.0 : y * std::log(std::abs(y)) - y; }

// ln(sin(pi v / 2) / (pi v / 2)) for |v| <= 1.
double smooth_near(double v) {
  if (v == 0.0) return 0.0;
  const double x = 0.5 * kPi * v;
  return std::log(std::sin(x) / x);
}

// ln(sin(pi u / 2) / ((pi u / 2)(pi (2 - u) / 2))) for u in [0, 2].
double smooth_far(double u) {
  const double x = 0.5 * kPi * u;
  const double y = 0.5 * kPi * (2.0 - u);
  if (u == 0.0 || u == 2.0) return -std::log(kPi);
  if (u < 1.0) return std::log(std::sin(x) / x) - std::log(y);
  return std::log(std::sin(y) / y) - std::log(x);
}

}  // namespace

double log_sine_integral(double x, double t) {
  if (!(x >= 0.0 && x <= 1.0) || !(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("log_sine_integral needs x and t in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  // sin^2 a - sin^2 b = sin(a - b) sin(a + b); the logarithmic singularities of
  // both factors are integrated exactly and the rest by Gauss-Legendre.
  const double lp2 = std::log(kPi / 2.0);
  double exact = 3.0 * x * lp2;
  exact += xlogx(x - t) - xlogx(-t);
  exact += xlogx(x + t) - xlogx(t);
  exact += xlogx(2.0 - t) - xlogx(2.0 - t - x);

  static const QuadratureRule rule = gauss_legendre(24);
  double smooth = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double s = 0.5 * x * (1.0 + rule.nodes[i]);
    smooth += rule.weights[i] * (smooth_near(s - t) + smooth_far(s + t));
  }
  return exact + 0.5 * x * smooth;
}

}  // namespace pathmin
