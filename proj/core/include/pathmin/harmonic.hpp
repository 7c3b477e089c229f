#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathmin/path_sim.hpp"
#include "pathmin/rng.hpp"
#include "pathmin/sc_map.hpp"
#include "pathmin/search_report.hpp"

namespace pathmin {

/// Hitting probabilities of the walk's edges for reflected Brownian motion
/// started deep in the strip.
struct EdgeMeasures {
  std::vector<double> t_left;
  std::vector<double> t_right;
  std::vector<double> weights;
  std::vector<double> stderrs;  ///< empty for analytic weights

  std::size_t size() const { return weights.size(); }
  double sum() const;
};

/// Arcsine law on the pre-vertices: weight_k proportional to
/// asin(sqrt(z_{k+1})) - asin(sqrt(z_k)), normalised to sum to one.
EdgeMeasures edge_measures_from_prevertices(const WalkPolygon& poly, std::span<const double> z);
/// Same measures from the pre-vertex gaps, accurate where z has crowded.
EdgeMeasures edge_measures_from_gaps(const WalkPolygon& poly, std::span<const double> gaps);

EdgeMeasures edge_measures(const WalkPolygon& poly, const PreVertexSolution& sol);
EdgeMeasures edge_measures(const WalkPolygon& poly, SolverKind solver,
                           const FullSolverOptions& options = {});

/// Reads a walk CSV with header "t,value". Throws std::invalid_argument naming
/// source:line for malformed rows, non-increasing times or nonzero end values.
WalkPolygon read_walk_csv(std::istream& in, double beta, std::string_view source_name = "<input>");

/// CSV "k,t_left,t_right,weight,stderr" (k from 0, stderr blank when unknown).
/// With an oracle, "oracle_weight,oracle_stderr" columns follow.
void write_edge_measures_csv(const EdgeMeasures& m, std::ostream& out,
                             const EdgeMeasures* oracle = nullptr);

enum class Strategy { max_measure, sample_measure };
std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct HmcParams {
  double beta = 1.0;
  Strategy strategy = Strategy::max_measure;
  SolverKind solver = SolverKind::full;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const HmcParams& p);

/// max_measure: argmax, lowest index among weights within a relative 1e-9 of
/// the maximum. sample_measure: one categorical draw. Indices start at 0.
std::size_t choose_edge(std::span<const double> weights, Strategy strategy, CounterRng& rng);
std::size_t choose_edge(const EdgeMeasures& m, Strategy strategy, CounterRng& rng);

/// Bisection guided by edge measures. The path must be pinned. Starts from
/// {0, 1/2, 1}; budget counts the queries after the endpoints, the first being
/// t = 1/2, so the report has budget + 2 queries. query_times lists the
/// non-endpoint queries in order.
SearchReport harmonic_bisection_search(LazyBridgePath& path, std::size_t budget,
                                       const HmcParams& params);

/// Same loop with edges chosen uniformly at random.
SearchReport random_bisection_search(LazyBridgePath& path, std::size_t budget,
                                     std::uint64_t seed);

/// Both searches on any oracle with f(0) = f(1) = 0.
SearchReport harmonic_bisection_search(const Oracle& f, std::size_t budget,
                                       const HmcParams& params);
SearchReport random_bisection_search(const Oracle& f, std::size_t budget, std::uint64_t seed);

struct HittingOracleParams {
  std::size_t walkers = 100000;
  double dt = 1e-4;
  double depth = 10.0;  ///< start depth below the lowest vertex
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 100'000'000;  ///< per walker
  unsigned threads = 1;

  void validate() const;
};

struct HittingDiagnostics {
  std::uint64_t total_steps = 0;
  std::uint64_t max_walker_steps = 0;
  std::uint64_t sphere_hits = 0;  ///< absorptions in the walk-on-spheres phase
};

/// Monte Carlo estimate of the edge measures: folded 2D Brownian walkers from
/// (1/2, min height - depth) until they first reach the walk. Walkers take
/// Gaussian steps of variance dt while farther than 6 sqrt(dt) from the walk
/// and walk-on-spheres jumps inside that band, absorbing 1e-10 from the walk.
/// Throws std::runtime_error if a walker exceeds max_steps.
EdgeMeasures mc_hitting_oracle(const WalkPolygon& poly, const HittingOracleParams& params,
                               HittingDiagnostics* diagnostics = nullptr);

/// Triangle-wave fold of x into [0, 1].
double fold_unit(double x);

}  // namespace pathmin
