#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "pathmin/harmonic.hpp"

namespace pathmin {

double fold_unit(double x) {
  double m = std::fmod(x, 2.0);
  if (m < 0.0) m += 2.0;
  return m <= 1.0 ? m : 2.0 - m;
}

void HittingOracleParams::validate() const {
  if (walkers < 1) throw std::invalid_argument("need at least one walker");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw std::invalid_argument("start depth must be positive");
  }
  if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
}

namespace {

class Boundary {
 public:
  explicit Boundary(const WalkPolygon& poly) : n_(poly.edges()) {
    for (std::size_t k = 0; k <= n_; ++k) {
      t_.push_back(poly.time(k));
      h_.push_back(poly.height(k));
    }
    floor_ = *std::min_element(h_.begin(), h_.end());
  }

  double floor() const { return floor_; }
  std::size_t edges() const { return n_; }

  std::size_t edge_at(double x) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), x);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - t_.begin() - 1, 0));
    return std::min(k, n_ - 1);
  }

  double gamma(double x) const {
    const std::size_t k = edge_at(x);
    const double s = (x - t_[k]) / (t_[k + 1] - t_[k]);
    return h_[k] + s * (h_[k + 1] - h_[k]);
  }

  /// First x where the chord (xa, ya) -> (xb, yb), xa and xb in [0, 1], reaches
  /// the walk; the chord starts strictly below it.
  std::optional<double> first_crossing(double xa, double ya, double xb, double yb) const {
    const double gb = yb - gamma(xb);
    const double lo = std::min(xa, xb);
    const double hi = std::max(xa, xb);
    // Vertices strictly inside the x-range are the only breakpoints.
    auto first = std::upper_bound(t_.begin(), t_.end(), lo);
    auto last = std::lower_bound(t_.begin(), t_.end(), hi);
    if (first >= last) {
      if (gb < 0.0) return std::nullopt;
      const double ga = ya - gamma(xa);
      const double s = ga / (ga - gb);
      return xa + s * (xb - xa);
    }
    double s_prev = 0.0;
    double g_prev = ya - gamma(xa);
    auto step_to = [&](double s, double g) -> std::optional<double> {
      if (g >= 0.0) {
        const double r = s_prev + (s - s_prev) * g_prev / (g_prev - g);
        return xa + r * (xb - xa);
      }
      s_prev = s;
      g_prev = g;
      return std::nullopt;
    };
    const double dx = xb - xa;
    if (dx > 0.0) {
      for (auto it = first; it != last; ++it) {
        const double s = (*it - xa) / dx;
        const auto k = static_cast<std::size_t>(it - t_.begin());
        if (auto hit = step_to(s, ya + s * (yb - ya) - h_[k])) return hit;
      }
    } else {
      for (auto it = last; it != first;) {
        --it;
        const double s = (*it - xa) / dx;
        const auto k = static_cast<std::size_t>(it - t_.begin());
        if (auto hit = step_to(s, ya + s * (yb - ya) - h_[k])) return hit;
      }
    }
    return step_to(1.0, gb);
  }

  struct Near {
    std::size_t edge;
    double dist;
  };

  /// Distance from (x, y), x in [0, 1], to the walk and to its mirror images
  /// in the strip walls, which is the distance to the boundary once the
  /// reflection is unfolded. Only edges within `reach` horizontally are
  /// examined; nullopt means the distance is at least `reach`.
  std::optional<Near> nearest(double x, double y, double reach) const {
    std::optional<Near> best;
    for (double px : {x, -x, 2.0 - x}) {
      const double lo = px - reach;
      const double hi = px + reach;
      if (hi < 0.0 || lo > 1.0) continue;
      std::size_t k = edge_at(std::max(0.0, lo));
      const std::size_t k_end = edge_at(std::min(1.0, hi));
      for (; k <= k_end; ++k) {
        const double ex = t_[k + 1] - t_[k];
        const double ey = h_[k + 1] - h_[k];
        const double s =
            std::clamp(((px - t_[k]) * ex + (y - h_[k]) * ey) / (ex * ex + ey * ey), 0.0, 1.0);
        const double dist = std::hypot(px - t_[k] - s * ex, y - h_[k] - s * ey);
        if (!best || dist < best->dist) best = Near{k, dist};
      }
    }
    if (best && best->dist >= reach) return std::nullopt;
    return best;
  }

 private:
  std::size_t n_;
  std::vector<double> t_;
  std::vector<double> h_;
  double floor_;
};

struct WalkerResult {
  std::size_t edge;
  std::uint64_t steps;
  bool sphere_hit;
};

// Absorption shell of the walk-on-spheres phase.
constexpr double kShell = 1e-10;

WalkerResult run_walker(const Boundary& b, const HittingOracleParams& p, std::uint64_t index) {
  CounterRng rng(p.seed, index);
  const double sdt = std::sqrt(p.dt);
  const double reach = 6.0 * sdt;
  double x = 0.5;
  double y = b.floor() - p.depth;
  for (std::uint64_t steps = 1; steps <= p.max_steps; ++steps) {
    if (y < b.floor()) {
      // Exact first passage of the vertical coordinate to the floor level.
      double z = rng.normal();
      while (z == 0.0) z = rng.normal();
      const double a = (b.floor() - y) / z;
      x = fold_unit(x + std::abs(a) * rng.normal());
      y = b.floor();
      if (y >= b.gamma(x)) return {b.edge_at(x), steps, false};
      continue;
    }
    if (auto near = b.nearest(x, y, reach)) {
      // Close to the walk: jump to the uniformly distributed exit point of the
      // largest disk that stays inside the unfolded domain.
      if (near->dist < kShell) return {near->edge, steps, true};
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      x = fold_unit(x + near->dist * std::cos(angle));
      y += near->dist * std::sin(angle);
      continue;
    }
    double xa = x;
    double ya = y;
    double xt = x + sdt * rng.normal();
    const double yt = y + sdt * rng.normal();
    // Split the chord at the walls, folding as it goes.
    for (;;) {
      double wall = -1.0;
      if (xt < 0.0) wall = 0.0;
      if (xt > 1.0) wall = 1.0;
      if (wall < 0.0) break;
      const double s = (wall - xa) / (xt - xa);
      const double yw = ya + s * (yt - ya);
      if (auto hit = b.first_crossing(xa, ya, wall, yw)) return {b.edge_at(*hit), steps, false};
      xa = wall;
      ya = yw;
      xt = 2.0 * wall - xt;
    }
    if (auto hit = b.first_crossing(xa, ya, xt, yt)) return {b.edge_at(*hit), steps, false};
    x = xt;
    y = yt;
  }
  throw std::runtime_error("hitting oracle walker " + std::to_string(index) + " exceeded " +
                           std::to_string(p.max_steps) + " steps");
}

}  // namespace

EdgeMeasures mc_hitting_oracle(const WalkPolygon& poly, const HittingOracleParams& params,
                               HittingDiagnostics* diagnostics) {
  params.validate();
  const Boundary boundary(poly);
  const std::size_t n = poly.edges();
  const unsigned threads = std::max(1u, params.threads);

  struct Partial {
    std::vector<std::uint64_t> counts;
    HittingDiagnostics diag;
    std::exception_ptr error;
  };
  std::vector<Partial> partials(threads);
  auto work = [&](unsigned id) {
    Partial& part = partials[id];
    part.counts.assign(n, 0);
    try {
      for (std::size_t i = id; i < params.walkers; i += threads) {
        const WalkerResult r = run_walker(boundary, params, i);
        ++part.counts[r.edge];
        part.diag.total_steps += r.steps;
        part.diag.max_walker_steps = std::max(part.diag.max_walker_steps, r.steps);
        if (r.sphere_hit) ++part.diag.sphere_hits;
      }
    } catch (...) {
      part.error = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> counts(n, 0);
  HittingDiagnostics diag;
  for (const auto& part : partials) {
    if (part.error) std::rethrow_exception(part.error);
    for (std::size_t k = 0; k < n; ++k) counts[k] += part.counts[k];
    diag.total_steps += part.diag.total_steps;
    diag.max_walker_steps = std::max(diag.max_walker_steps, part.diag.max_walker_steps);
    diag.sphere_hits += part.diag.sphere_hits;
  }
  if (diagnostics) *diagnostics = diag;

  EdgeMeasures m;
  const auto total = static_cast<double>(params.walkers);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = static_cast<double>(counts[k]) / total;
    m.t_left.push_back(poly.time(k));
    m.t_right.push_back(poly.time(k + 1));
    m.weights.push_back(p);
    m.stderrs.push_back(std::sqrt(p * (1.0 - p) / total));
  }
  return m;
}

}  // namespace pathmin
