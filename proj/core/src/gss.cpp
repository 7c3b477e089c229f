#include "pathmin/gss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pathmin {
namespace {

// 1/phi and 1/phi^2; they sum to 1.
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
const double kInvPhi2 = (3.0 - std::sqrt(5.0)) / 2.0;

std::string_view to_string(GssStopRule rule) {
  return rule == GssStopRule::endpoint_shift ? "endpoint_shift" : "endpoint_value";
}

struct Best {
  double t = 0.0;
  double value = std::numeric_limits<double>::infinity();
  void offer(double time, double v) {
    if (v < value) {
      value = v;
      t = time;
    }
  }
};

}  // namespace

void GssParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("GSS epsilon must be positive");
  if (max_iters < 1) throw std::invalid_argument("GSS max_iters must be at least 1");
}

nlohmann::json to_json(const GssParams& p) {
  return {{"epsilon", p.epsilon}, {"max_iters", p.max_iters}, {"stop_rule", to_string(p.stop_rule)}};
}

GssParams gss_params_from_json(const nlohmann::json& j) {
  GssParams p;
  p.epsilon = j.value("epsilon", p.epsilon);
  p.max_iters = j.value("max_iters", p.max_iters);
  const std::string rule = j.value("stop_rule", std::string(to_string(p.stop_rule)));
  if (rule == "endpoint_shift") {
    p.stop_rule = GssStopRule::endpoint_shift;
  } else if (rule == "endpoint_value") {
    p.stop_rule = GssStopRule::endpoint_value;
  } else {
    throw std::invalid_argument("unknown GSS stop rule '" + rule + "'");
  }
  p.validate();
  return p;
}

SearchReport golden_section(const Oracle& f, double a, double b, const GssParams& params,
                            const GssObserver& observer) {
  params.validate();
  if (!(b > a)) throw std::invalid_argument("golden_section needs b > a");
  Stopwatch clock;
  std::size_t calls = 0;
  Best best;
  const auto eval = [&](double t) {
    ++calls;
    const double v = f(t);
    best.offer(t, v);
    return v;
  };

  double fa = eval(a);
  double t1 = a + (b - a) * kInvPhi2;
  double t2 = a + (b - a) * kInvPhi;
  double f1 = eval(t1);
  double f2 = eval(t2);
  double fb = eval(b);

  int iteration = 0;
  while (true) {
    double shift = 0.0;
    bool need_left = false;
    // Ties keep the left interval.
    if (f1 <= f2) {
      shift = params.stop_rule == GssStopRule::endpoint_shift ? std::abs(b - t2) : std::abs(fb - f2);
      b = t2;
      fb = f2;
      t2 = t1;
      f2 = f1;
      t1 = a + (b - a) * kInvPhi2;
      need_left = true;
    } else {
      shift = params.stop_rule == GssStopRule::endpoint_shift ? std::abs(t1 - a) : std::abs(f1 - fa);
      a = t1;
      fa = f1;
      t1 = t2;
      f1 = f2;
      t2 = a + (b - a) * kInvPhi;
    }
    ++iteration;
    const bool done = shift < params.epsilon || iteration >= params.max_iters;
    if (!done) {
      if (need_left) {
        f1 = eval(t1);
      } else {
        f2 = eval(t2);
      }
    }
    if (observer) observer(GssStep{iteration, a, b, t1, t2, best.value});
    if (done) break;
  }

  SearchReport report;
  report.argmin_t = best.t;
  report.min_value = best.value;
  report.queries = calls;
  report.method = "golden-section";
  report.params = to_json(params);
  report.params["iterations"] = iteration;
  report.wall_time = clock.seconds();
  return report;
}

SearchReport iterative_gss(const Oracle& f, int m, const GssParams& params) {
  params.validate();
  if (m < 0 || m > 30) throw std::invalid_argument("partition exponent m must be in [0, 30]");
  Stopwatch clock;
  const std::size_t pieces = std::size_t{1} << m;
  const double width = std::ldexp(1.0, -m);
  std::size_t calls = 0;
  Best best;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double a = static_cast<double>(k) * width;
    const double b = k + 1 == pieces ? 1.0 : static_cast<double>(k + 1) * width;
    const SearchReport sub = golden_section(f, a, b, params);
    calls += sub.queries;
    best.offer(sub.argmin_t, sub.min_value);
  }
  // The endpoints were already evaluated by the first and last sub-searches;
  // adding them to the minimum-list costs nothing extra.
  best.offer(0.0, f(0.0));
  best.offer(1.0, f(1.0));

  SearchReport report;
  report.argmin_t = best.t;
  report.min_value = best.value;
  report.queries = calls;
  report.method = "iter-gss";
  report.params = to_json(params);
  report.params["m"] = m;
  report.wall_time = clock.seconds();
  return report;
}

SearchReport iterative_gss(LazyBridgePath& path, int m, const GssParams& params) {
  SearchReport report = iterative_gss([&path](double t) { return path.query(t); }, m, params);
  report.seed = path.seed();
  return report;
}

double naive_gss_error_trial(std::uint64_t seed, int level, const GssParams& params) {
  const GridPath grid = fill_dyadic(seed, level, true);
  const SearchReport r = golden_section([&grid](double t) { return grid.at(t); }, 0.0, 1.0, params);
  return std::abs(r.min_value - grid.grid_min().value);
}

}  // namespace pathmin
