#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathmin/rng.hpp"

namespace pathmin {

enum class ProcessKind {
  brownian_bridge,  ///< pinned: both endpoints are 0
  brownian_motion,  ///< unpinned bridge, endpoint drawn standard normal
  cauchy,
};

std::string_view to_string(ProcessKind kind);
ProcessKind process_kind_from_string(std::string_view name);

/// Mean, variance and sample for a Brownian bridge between two sampled
/// neighbours. Shared by the lazy and the dyadic samplers so both produce
/// bit-identical values.
inline double bridge_conditional_sample(double t_left, double v_left, double t_right,
                                        double v_right, double t, double z) {
  const double span = t_right - t_left;
  const double mean = v_left + (t - t_left) / span * (v_right - v_left);
  const double variance = (t - t_left) * (t_right - t) / span;
  return mean + std::sqrt(variance) * z;
}

/// Brownian bridge on [0, 1] that is sampled only where it is queried.
///
/// A new time is drawn from the bridge law conditioned on its two nearest
/// sampled neighbours; once sampled, a time keeps its value. Not safe for
/// concurrent queries.
class LazyBridgePath {
 public:
  /// Path with points {(0, 0), (1, W)}. W is 0 when pinned, else the first
  /// standard normal of the (seed, stream) generator.
  LazyBridgePath(std::uint64_t seed, bool pinned, std::uint64_t stream = 0);

  /// Value at t in [0, 1]; samples and stores it on first use.
  /// Throws std::out_of_range for t outside [0, 1].
  double query(double t);

  bool is_sampled(double t) const { return points_.contains(t); }
  double endpoint_value() const { return points_.rbegin()->second; }
  bool pinned() const { return pinned_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return points_.size(); }

  /// Sampled (t, value) pairs in increasing time order.
  std::vector<std::pair<double, double>> points() const;

 private:
  std::map<double, double> points_;
  CounterRng rng_;
  std::uint64_t seed_;
  bool pinned_;
};

/// Convenience spelling of the LazyBridgePath constructor.
LazyBridgePath new_bridge(std::uint64_t seed, bool pinned, std::uint64_t stream = 0);

struct GridMin {
  std::size_t index = 0;
  double time = 0.0;
  double value = 0.0;
};

/// Immutable path on the 2^level + 1 dyadic times k / 2^level.
class GridPath {
 public:
  GridPath(int level, std::vector<double> values, ProcessKind kind, std::uint64_t seed);

  int level() const { return level_; }
  std::size_t size() const { return values_.size(); }
  std::size_t cells() const { return values_.size() - 1; }
  ProcessKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }
  double time(std::size_t k) const { return static_cast<double>(k) * step_; }
  double step() const { return step_; }

  /// Smallest value; ties resolve to the earliest time.
  const GridMin& grid_min() const { return min_; }
  /// Largest value; ties resolve to the earliest time.
  GridMin grid_max() const;

  /// Piecewise-linear interpolation of the grid values; exact at nodes.
  double at(double t) const;

 private:
  int level_;
  double step_;
  std::vector<double> values_;
  ProcessKind kind_;
  std::uint64_t seed_;
  GridMin min_;
};

/// Samples every dyadic time of the given level on an existing path, in
/// midpoint-first breadth-first order, and returns them as a grid.
GridPath fill_dyadic(LazyBridgePath& path, int level);

/// Same values as fill_dyadic(new_bridge(seed, pinned), level) without the
/// lazy container.
GridPath fill_dyadic(std::uint64_t seed, int level, bool pinned = true);

/// Cauchy process on the dyadic grid: X(0) = 0, i.i.d. Cauchy increments with
/// scale 2^-level.
GridPath simulate_cauchy(std::uint64_t seed, int level);

/// Marginal CDF of the midpoint deviation v of a Cauchy bridge whose
/// endpoint sits at 2u after two unit time steps.
struct CauchyBridgeCdf {
  explicit CauchyBridgeCdf(double u);
  double u;
};

/// G(u, v); nondecreasing in v with limits 0 and 1.
double cauchy_bridge_cdf(const CauchyBridgeCdf& c, double v);

/// Inverse of cauchy_bridge_cdf for p in (0, 1); |G(u, v) - p| <= 1e-10.
double cauchy_bridge_sample(const CauchyBridgeCdf& c, double p);

// GridPath serialisation: CSV with header "t,value" and 17 significant digits,
// plus a JSON metadata sidecar {seed, level, kind}.
void write_grid_csv(const GridPath& path, std::ostream& out);
nlohmann::json grid_metadata(const GridPath& path);

/// Parses "t,value" rows. The row count must be 2^l + 1 with l >= 1 and the
/// times must be the dyadic grid. Throws std::invalid_argument naming the
/// offending line.
GridPath read_grid_csv(std::istream& in, ProcessKind kind, std::uint64_t seed,
                       std::string_view source_name = "<input>");

}  // namespace pathmin
