#include "pathmin/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace pathmin {

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::brownian_bridge: return "brownian_bridge";
    case ProcessKind::brownian_motion: return "brownian_motion";
    case ProcessKind::cauchy: return "cauchy";
  }
  return "unknown";
}

ProcessKind process_kind_from_string(std::string_view name) {
  if (name == "brownian_bridge" || name == "bridge") return ProcessKind::brownian_bridge;
  if (name == "brownian_motion" || name == "brownian" || name == "motion") return ProcessKind::brownian_motion;
  if (name == "cauchy") return ProcessKind::cauchy;
  throw std::invalid_argument("unknown process kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// LazyBridgePath

LazyBridgePath::LazyBridgePath(std::uint64_t seed, bool pinned, std::uint64_t stream)
    : rng_(seed, stream), seed_(seed), pinned_(pinned) {
  const double endpoint = pinned ? 0.0 : rng_.normal();
  points_.emplace(0.0, 0.0);
  points_.emplace(1.0, endpoint);
}

LazyBridgePath new_bridge(std::uint64_t seed, bool pinned, std::uint64_t stream) {
  return LazyBridgePath(seed, pinned, stream);
}

double LazyBridgePath::query(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("bridge query time " + std::to_string(t) + " outside [0, 1]");
  }
  auto right = points_.lower_bound(t);
  if (right->first == t) return right->second;
  auto left = std::prev(right);
  const double value = bridge_conditional_sample(left->first, left->second, right->first,
                                                 right->second, t, rng_.normal());
  points_.emplace_hint(right, t, value);
  return value;
}

std::vector<std::pair<double, double>> LazyBridgePath::points() const {
  return {points_.begin(), points_.end()};
}

// ---------------------------------------------------------------------------
// GridPath

namespace {

void check_level(int level) {
  if (level < 1 || level > 30) {
    throw std::invalid_argument("grid level must be in [1, 30], got " + std::to_string(level));
  }
}

}  // namespace

GridPath::GridPath(int level, std::vector<double> values, ProcessKind kind, std::uint64_t seed)
    : level_(level), step_(std::ldexp(1.0, -level)), values_(std::move(values)), kind_(kind),
      seed_(seed) {
  check_level(level);
  const std::size_t expected = (std::size_t{1} << level) + 1;
  if (values_.size() != expected) {
    throw std::invalid_argument("grid of level " + std::to_string(level) + " needs " +
                                std::to_string(expected) + " values, got " +
                                std::to_string(values_.size()));
  }
  const auto it = std::min_element(values_.begin(), values_.end());
  min_.index = static_cast<std::size_t>(it - values_.begin());
  min_.time = time(min_.index);
  min_.value = *it;
}

GridMin GridPath::grid_max() const {
  const auto it = std::max_element(values_.begin(), values_.end());
  GridMin m;
  m.index = static_cast<std::size_t>(it - values_.begin());
  m.time = time(m.index);
  m.value = *it;
  return m;
}

double GridPath::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("grid path time " + std::to_string(t) + " outside [0, 1]");
  }
  const double x = t / step_;
  const auto k = static_cast<std::size_t>(x);
  if (k >= cells()) return values_.back();
  const double frac = x - static_cast<double>(k);
  if (frac == 0.0) return values_[k];
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

GridPath fill_dyadic(LazyBridgePath& path, int level) {
  check_level(level);
  const std::size_t n = std::size_t{1} << level;
  const double h = std::ldexp(1.0, -level);
  std::vector<double> values(n + 1);
  values[0] = path.query(0.0);
  values[n] = path.query(1.0);
  for (int depth = 1; depth <= level; ++depth) {
    const std::size_t stride = n >> depth;
    for (std::size_t j = stride; j < n; j += 2 * stride) {
      values[j] = path.query(static_cast<double>(j) * h);
    }
  }
  return GridPath(level, std::move(values),
                  path.pinned() ? ProcessKind::brownian_bridge : ProcessKind::brownian_motion,
                  path.seed());
}

GridPath fill_dyadic(std::uint64_t seed, int level, bool pinned) {
  check_level(level);
  CounterRng rng(seed, 0);
  const std::size_t n = std::size_t{1} << level;
  const double h = std::ldexp(1.0, -level);
  std::vector<double> values(n + 1);
  values[0] = 0.0;
  values[n] = pinned ? 0.0 : rng.normal();
  for (int depth = 1; depth <= level; ++depth) {
    const std::size_t stride = n >> depth;
    for (std::size_t j = stride; j < n; j += 2 * stride) {
      values[j] = bridge_conditional_sample(static_cast<double>(j - stride) * h,
                                            values[j - stride],
                                            static_cast<double>(j + stride) * h,
                                            values[j + stride], static_cast<double>(j) * h,
                                            rng.normal());
    }
  }
  return GridPath(level, std::move(values),
                  pinned ? ProcessKind::brownian_bridge : ProcessKind::brownian_motion, seed);
}

GridPath simulate_cauchy(std::uint64_t seed, int level) {
  check_level(level);
  CounterRng rng(seed, 0);
  const std::size_t n = std::size_t{1} << level;
  const double scale = std::ldexp(1.0, -level);
  std::vector<double> values(n + 1);
  values[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    values[k] = values[k - 1] + scale * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
  }
  return GridPath(level, std::move(values), ProcessKind::cauchy, seed);
}

// ---------------------------------------------------------------------------
// Cauchy bridge marginal

CauchyBridgeCdf::CauchyBridgeCdf(double u_) : u(u_) {
  if (!(u_ > 0.0) || !std::isfinite(u_)) {
    throw std::invalid_argument("Cauchy bridge parameter u must be positive and finite");
  }
}

double cauchy_bridge_cdf(const CauchyBridgeCdf& c, double v) {
  const double u = c.u;
  if (!(u > 0.0)) throw std::invalid_argument("Cauchy bridge parameter u must be positive");
  if (std::isinf(v)) return v > 0 ? 1.0 : 0.0;
  // ln(((u+v)^2+1)/((u-v)^2+1)) written as log1p of a bounded-below ratio, and
  // atan(u+v) - atan(u-v) folded into a single atan2; both stay accurate for
  // large |v| where the raw differences cancel.
  const double d = u - v;
  const double log_term = std::log1p(4.0 * u * v / (d * d + 1.0));
  const double atan_term = std::atan2(2.0 * v, 1.0 + u * u - v * v);
  const double g = (log_term + 2.0 * u * atan_term) / (4.0 * u * std::numbers::pi) + 0.5;
  return std::clamp(g, 0.0, 1.0);
}

double cauchy_bridge_sample(const CauchyBridgeCdf& c, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("probability must lie in (0, 1)");
  }
  const auto f = [&](double v) { return cauchy_bridge_cdf(c, v) - p; };
  double lo = -1.0, hi = 1.0;
  while (f(lo) > 0.0) lo *= 2.0;
  while (f(hi) < 0.0) hi *= 2.0;
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double v = 0.5 * (a + b);
  return std::abs(f(a)) < std::abs(f(v)) ? a : (std::abs(f(b)) < std::abs(f(v)) ? b : v);
}

}  // namespace pathmin
