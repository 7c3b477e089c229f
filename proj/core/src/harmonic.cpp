#include "pathmin/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "csv_util.hpp"

namespace pathmin {

double EdgeMeasures::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

EdgeMeasures edge_measures_from_prevertices(const WalkPolygon& poly, std::span<const double> z) {
  if (z.size() != poly.nodes()) throw std::invalid_argument("pre-vertex count mismatch");
  for (std::size_t k = 1; k < z.size(); ++k) {
    if (!(z[k] > z[k - 1])) throw std::invalid_argument("pre-vertices must increase strictly");
  }
  if (z.front() != 0.0 || z.back() != 1.0) {
    throw std::invalid_argument("pre-vertices must run from 0 to 1");
  }
  const std::size_t n = poly.edges();
  EdgeMeasures m;
  m.t_left.resize(n);
  m.t_right.resize(n);
  m.weights.resize(n);
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double next = std::asin(std::sqrt(z[k + 1]));
    m.t_left[k] = poly.time(k);
    m.t_right[k] = poly.time(k + 1);
    m.weights[k] = 2.0 / std::numbers::pi * (next - prev);
    total += m.weights[k];
    prev = next;
  }
  for (double& w : m.weights) w /= total;
  return m;
}

namespace {

/// Prefix and suffix sums of the gaps: z_k and 1 - z_k without cancellation.
void head_tail(std::span<const double> g, std::vector<double>& head, std::vector<double>& tail) {
  const std::size_t n = g.size();
  head.assign(n + 1, 0.0);
  tail.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) head[k + 1] = head[k] + g[k];
  for (std::size_t k = n; k-- > 0;) tail[k] = tail[k + 1] + g[k];
  const double total = head[n];
  for (std::size_t k = 0; k <= n; ++k) {
    head[k] /= total;
    tail[k] /= total;
  }
}

/// asin(sqrt(b)) - asin(sqrt(a)) for a = head_a, b = a + g, 1 - a = tail_a,
/// 1 - b = tail_b.
double arcsine_angle_gap(double head_a, double tail_a, double g, double head_b, double tail_b) {
  const double s = g / (std::sqrt(head_b * tail_a) + std::sqrt(head_a * tail_b));
  const double c = std::sqrt(head_a * head_b) + std::sqrt(tail_a * tail_b);
  return std::atan2(s, c);
}

}  // namespace

EdgeMeasures edge_measures_from_gaps(const WalkPolygon& poly, std::span<const double> gaps) {
  if (gaps.size() != poly.edges()) throw std::invalid_argument("gap count mismatch");
  for (double g : gaps) {
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("gaps must be positive");
  }
  std::vector<double> head;
  std::vector<double> tail;
  head_tail(gaps, head, tail);
  const double total_gap = head.back();
  const std::size_t n = poly.edges();
  EdgeMeasures m;
  m.t_left.resize(n);
  m.t_right.resize(n);
  m.weights.resize(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    m.t_left[k] = poly.time(k);
    m.t_right[k] = poly.time(k + 1);
    m.weights[k] = 2.0 / std::numbers::pi *
                   arcsine_angle_gap(head[k], tail[k], gaps[k] / total_gap, head[k + 1],
                                     tail[k + 1]);
    total += m.weights[k];
  }
  for (double& w : m.weights) w /= total;
  return m;
}

EdgeMeasures edge_measures(const WalkPolygon& poly, const PreVertexSolution& sol) {
  if (!sol.gaps.empty()) return edge_measures_from_gaps(poly, sol.gaps);
  return edge_measures_from_prevertices(poly, sol.z);
}

EdgeMeasures edge_measures(const WalkPolygon& poly, SolverKind solver,
                           const FullSolverOptions& options) {
  return edge_measures(poly, solve_prevertices(poly, solver, options));
}

void write_edge_measures_csv(const EdgeMeasures& m, std::ostream& out,
                             const EdgeMeasures* oracle) {
  if (oracle && oracle->size() != m.size()) {
    throw std::invalid_argument("oracle and analytic measures differ in edge count");
  }
  out << "k,t_left,t_right,weight,stderr";
  if (oracle) out << ",oracle_weight,oracle_stderr";
  out << '\n';
  for (std::size_t k = 0; k < m.size(); ++k) {
    out << k << ',' << detail::format_double(m.t_left[k]) << ','
        << detail::format_double(m.t_right[k]) << ',' << detail::format_double(m.weights[k])
        << ',';
    if (!m.stderrs.empty()) out << detail::format_double(m.stderrs[k]);
    if (oracle) {
      out << ',' << detail::format_double(oracle->weights[k]) << ',';
      if (!oracle->stderrs.empty()) out << detail::format_double(oracle->stderrs[k]);
    }
    out << '\n';
  }
}

std::string_view to_string(Strategy s) {
  return s == Strategy::max_measure ? "max" : "sample";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "max" || name == "max_measure") return Strategy::max_measure;
  if (name == "sample" || name == "sample_measure") return Strategy::sample_measure;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void HmcParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be finite and nonnegative");
  }
}

nlohmann::json to_json(const HmcParams& p) {
  return {{"beta", p.beta},
          {"strategy", to_string(p.strategy)},
          {"solver", to_string(p.solver)},
          {"seed", p.seed}};
}

std::size_t choose_edge(std::span<const double> weights, Strategy strategy, CounterRng& rng) {
  if (weights.empty()) throw std::invalid_argument("no edges to choose from");
  double total = 0.0;
  double top = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("edge weights must be finite and nonnegative");
    }
    total += w;
    top = std::max(top, w);
  }
  if (!(total > 0.0)) throw std::invalid_argument("edge weights are all zero");
  if (strategy == Strategy::max_measure) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] >= top * (1.0 - 1e-9)) return k;
    }
    return weights.size() - 1;
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    acc += weights[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

std::size_t choose_edge(const EdgeMeasures& m, Strategy strategy, CounterRng& rng) {
  return choose_edge(m.weights, strategy, rng);
}

namespace {

// Shared bisection loop. weigh(times, values, inserted_edge) returns one weight
// per edge; inserted_edge is the edge split by the previous step, or npos.
template <class Weigh>
SearchReport bisection_loop(const Oracle& f, std::size_t budget, Strategy strategy,
                            CounterRng& rng, Weigh&& weigh) {
  if (budget < 1) throw std::invalid_argument("search budget must be at least 1");
  Stopwatch clock;
  SearchReport report;
  std::vector<double> t = {0.0, 0.5, 1.0};
  std::vector<double> w = {f(0.0), 0.0, f(1.0)};
  if (w[0] != 0.0 || w[2] != 0.0) {
    throw std::invalid_argument("bisection search needs a path that is 0 at both ends");
  }
  w[1] = f(0.5);
  report.query_times.push_back(0.5);
  std::size_t split = std::numeric_limits<std::size_t>::max();
  for (std::size_t q = 1; q < budget; ++q) {
    std::vector<double> weights = weigh(t, w, split);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const double mid = 0.5 * (t[k] + t[k + 1]);
      if (!(mid > t[k] && mid < t[k + 1])) weights[k] = 0.0;
    }
    if (std::all_of(weights.begin(), weights.end(), [](double x) { return x == 0.0; })) break;
    split = choose_edge(weights, strategy, rng);
    const double mid = 0.5 * (t[split] + t[split + 1]);
    const double value = f(mid);
    t.insert(t.begin() + static_cast<std::ptrdiff_t>(split) + 1, mid);
    w.insert(w.begin() + static_cast<std::ptrdiff_t>(split) + 1, value);
    report.query_times.push_back(mid);
  }
  const auto best = std::min_element(w.begin(), w.end());
  report.min_value = *best;
  report.argmin_t = t[static_cast<std::size_t>(best - w.begin())];
  report.queries = t.size();
  report.wall_time = clock.seconds();
  return report;
}

Oracle lazy_oracle(LazyBridgePath& path) {
  if (!path.pinned()) throw std::invalid_argument("bisection search needs a pinned path");
  return [&path](double t) { return path.query(t); };
}

}  // namespace

SearchReport harmonic_bisection_search(LazyBridgePath& path, std::size_t budget,
                                       const HmcParams& params) {
  SearchReport report = harmonic_bisection_search(lazy_oracle(path), budget, params);
  report.seed = path.seed();
  return report;
}

SearchReport random_bisection_search(LazyBridgePath& path, std::size_t budget,
                                     std::uint64_t seed) {
  SearchReport report = random_bisection_search(lazy_oracle(path), budget, seed);
  report.seed = path.seed();
  return report;
}

SearchReport harmonic_bisection_search(const Oracle& f, std::size_t budget,
                                       const HmcParams& params) {
  params.validate();
  CounterRng rng(params.seed);
  std::vector<double> gaps;
  std::size_t fallbacks = 0;
  std::string last_failure;
  auto weigh = [&](const std::vector<double>& t, const std::vector<double>& w,
                   std::size_t split) {
    const std::size_t n = t.size() - 1;
    if (split < gaps.size() && gaps.size() + 2 == t.size()) {
      // Split the gap at the arcsine midpoint of its end points.
      std::vector<double> head;
      std::vector<double> tail;
      head_tail(gaps, head, tail);
      const double g = gaps[split] / head.back();
      const double a = head[split];
      const double b = head[split + 1];
      const double delta =
          0.5 * arcsine_angle_gap(a, tail[split], g, b, tail[split + 1]);
      double left;
      if (a < 0.5) {
        left = std::sin(delta) * std::sin(2.0 * std::asin(std::sqrt(a)) + delta);
      } else {
        left = g - std::sin(delta) * std::sin(2.0 * std::asin(std::sqrt(tail[split + 1])) + delta);
      }
      left = std::clamp(left, 1e-3 * g, (1.0 - 1e-3) * g);
      gaps[split] = g - left;
      for (std::size_t k = 0; k < gaps.size(); ++k) {
        if (k != split) gaps[k] /= head.back();
      }
      gaps.insert(gaps.begin() + static_cast<std::ptrdiff_t>(split), left);
    } else {
      gaps.clear();
    }
    try {
      const WalkPolygon poly(t, w, params.beta);
      PreVertexSolution sol;
      if (params.solver == SolverKind::full) {
        FullSolverOptions opts;
        opts.initial_gaps = gaps;
        sol = solve_prevertices_full(poly, opts);
      } else {
        sol = solve_prevertices_perturbative(poly);
      }
      auto m = edge_measures(poly, sol);
      gaps = sol.gaps;
      return m.weights;
    } catch (const std::exception& e) {
      ++fallbacks;
      last_failure = e.what();
      gaps.clear();
      return std::vector<double>(n, 1.0 / static_cast<double>(n));
    }
  };
  SearchReport report = bisection_loop(f, budget, params.strategy, rng, weigh);
  report.method = "harmonic";
  report.params = to_json(params);
  report.params["budget"] = budget;
  report.params["solver_fallbacks"] = fallbacks;
  if (fallbacks > 0) report.params["last_solver_failure"] = last_failure;
  return report;
}

SearchReport random_bisection_search(const Oracle& f, std::size_t budget, std::uint64_t seed) {
  CounterRng rng(seed);
  auto weigh = [](const std::vector<double>& t, const std::vector<double>&, std::size_t) {
    return std::vector<double>(t.size() - 1, 1.0);
  };
  SearchReport report = bisection_loop(f, budget, Strategy::sample_measure, rng, weigh);
  report.method = "random-bisection";
  report.params = {{"budget", budget}, {"seed", seed}};
  return report;
}

}  // namespace pathmin
