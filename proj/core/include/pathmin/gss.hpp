#pragma once

#include <cstdint>
#include <functional>

#include "pathmin/path_sim.hpp"
#include "pathmin/search_report.hpp"

namespace pathmin {

/// How a golden-section sub-search decides it has converged.
enum class GssStopRule {
  /// |position of moving endpoint before - after| < epsilon.
  endpoint_shift,
  /// |f(moving endpoint before) - f(moving endpoint after)| < epsilon.
  endpoint_value,
};

struct GssParams {
  double epsilon = 1e-3;
  int max_iters = 200;
  GssStopRule stop_rule = GssStopRule::endpoint_shift;

  /// Throws std::invalid_argument unless epsilon > 0 and max_iters >= 1.
  void validate() const;
};

nlohmann::json to_json(const GssParams& p);
/// Reads epsilon, max_iters and stop_rule; absent keys keep their defaults.
GssParams gss_params_from_json(const nlohmann::json& j);

/// State after each bracket shrink, for callers that want to watch the search.
struct GssStep {
  int iteration = 0;  ///< shrinks performed so far
  double a = 0.0, b = 0.0;
  double t1 = 0.0, t2 = 0.0;
  double best_value = 0.0;
};
using GssObserver = std::function<void(const GssStep&)>;

/// Golden-section search on [a, b].
///
/// Evaluates a, b and the interior points a + (b-a)/phi^2, a + (b-a)/phi, then
/// keeps [a, t2] when f(t1) <= f(t2) and [t1, b] otherwise, reusing the
/// surviving interior value so each further shrink costs one oracle call. A
/// run with n shrinks makes n + 3 calls. Returns the best point queried.
SearchReport golden_section(const Oracle& f, double a, double b, const GssParams& params,
                            const GssObserver& observer = {});

/// Golden-section search on each of the 2^m equal pieces of [0, 1], followed by
/// a scan of the collected minima together with the two endpoints.
SearchReport iterative_gss(const Oracle& f, int m, const GssParams& params);
SearchReport iterative_gss(LazyBridgePath& path, int m, const GssParams& params);

/// Naive golden-section search on the piecewise-linear grid path of the given
/// level; returns |estimate - grid minimum|.
double naive_gss_error_trial(std::uint64_t seed, int level, const GssParams& params);

}  // namespace pathmin
