#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathmin/path_sim.hpp"

namespace pathmin {

/// One parameter setting of one method.
///
/// Methods and their params:
///   naive-gss          {epsilon, max_iters, stop_rule}
///   iter-gss           {m, epsilon, max_iters, stop_rule}
///   mcb                {l, r, g}            (path level is l)
///   harmonic           {budget, beta, strategy, solver}
///   random-bisection   {budget}
/// Missing GSS keys take the GssParams defaults.
struct BenchCell {
  std::string method;
  nlohmann::json params = nlohmann::json::object();
};

struct TrialGrid {
  std::vector<BenchCell> cells;
  std::size_t trials = 500;
  std::size_t repeats = 1;  ///< independent repetitions of every cell, one row each
  std::uint64_t seed = 0;
  int level = 10;           ///< path level for all but mcb cells
  unsigned threads = 1;

  void validate() const;

  /// iter-gss cells m = 1..m_max.
  static TrialGrid iterative_gss(int m_max, std::size_t trials, std::uint64_t seed);
  /// mcb cells (l, r, g) = (n, n, 2^n), n = 1..n_max.
  static TrialGrid mcb_scaling(int n_max, std::size_t trials, std::uint64_t seed);
};

TrialGrid trial_grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrialGrid& grid);

struct BenchRow {
  std::string method;
  nlohmann::json params;
  std::size_t cell = 0;
  std::size_t repeat = 0;
  double mean_error = 0.0;
  double stderr_error = 0.0;
  double mean_wall_time = 0.0;
  double mean_queries = 0.0;
  std::size_t trials = 0;     ///< successful trials
  std::size_t failures = 0;
  bool flagged = false;       ///< more than 1% of trials failed
  std::uint64_t seed = 0;
};

/// Runs every cell; trial seeds are derive_seed(seed, cell, repeat, trial).
/// Per-trial failures are counted, not thrown.
std::vector<BenchRow> run_grid(const TrialGrid& grid);

/// Single trial of a cell, for tests and tools: error, wall time and queries.
struct TrialResult {
  double error = 0.0;
  double wall_time = 0.0;
  double queries = 0.0;
};
TrialResult run_trial(const BenchCell& cell, int level, std::uint64_t trial_seed);

/// Fills the dyadic grid of the given level into the path and returns the
/// minimum over every point it then holds: the reference for scoring searches
/// on lazy paths.
double lazy_path_minimum(LazyBridgePath& path, int level);

nlohmann::json to_json(const BenchRow& row);
/// Header: method,params,cell,repeat,mean_error,stderr_error,mean_wall_time,
/// mean_queries,trials,failures,flagged,seed. params is "k=v;k=v".
void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out);
/// Long format: method,cell,repeat,param,param_value,metric,value with one line
/// per (row, numeric parameter, metric).
void write_bench_long_csv(std::span<const BenchRow> rows, std::ostream& out);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> v);

/// Calls fn(i) for i in [0, count) on up to `threads` threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Grid max minus grid min of a simulated path, with |argmax - argmin|.
struct RangeSample {
  double range = 0.0;
  double gap = 0.0;
};

struct RangeDistribution {
  ProcessKind kind = ProcessKind::brownian_bridge;
  int level = 0;
  std::uint64_t seed = 0;
  std::vector<double> bin_edges;  ///< bins + 1 edges from 0 to the largest range
  std::vector<double> density;    ///< integrates to one
  std::vector<RangeSample> samples;

  double mean_range() const;
  /// Empirical quantile (linear interpolation of order statistics).
  double range_quantile(double p) const;
};

/// Path i uses seed derive_seed(seed, i).
RangeDistribution range_distribution(ProcessKind kind, int level, std::size_t paths,
                                     std::size_t bins, std::uint64_t seed, unsigned threads = 1);

/// "bin_left,bin_right,density"
void write_range_histogram_csv(const RangeDistribution& d, std::ostream& out);
/// "path,range,gap"
void write_range_samples_csv(const RangeDistribution& d, std::ostream& out);

}  // namespace pathmin
