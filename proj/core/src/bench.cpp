#include "pathmin/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "csv_util.hpp"
#include "pathmin/gss.hpp"
#include "pathmin/harmonic.hpp"
#include "pathmin/mcb.hpp"

namespace pathmin {

void TrialGrid::validate() const {
  if (cells.empty()) throw std::invalid_argument("trial grid has no cells");
  if (trials < 1) throw std::invalid_argument("trial grid needs at least one trial per cell");
  if (repeats < 1) throw std::invalid_argument("trial grid needs at least one repeat");
  if (level < 1 || level > 30) throw std::invalid_argument("path level must be in [1, 30]");
  for (const auto& c : cells) {
    if (c.method != "naive-gss" && c.method != "iter-gss" && c.method != "mcb" &&
        c.method != "harmonic" && c.method != "random-bisection") {
      throw std::invalid_argument("unknown bench method '" + c.method + "'");
    }
    if (!c.params.is_object()) throw std::invalid_argument("cell params must be an object");
  }
}

TrialGrid TrialGrid::iterative_gss(int m_max, std::size_t trials, std::uint64_t seed) {
  TrialGrid g;
  for (int m = 1; m <= m_max; ++m) g.cells.push_back({"iter-gss", {{"m", m}}});
  g.trials = trials;
  g.seed = seed;
  return g;
}

TrialGrid TrialGrid::mcb_scaling(int n_max, std::size_t trials, std::uint64_t seed) {
  TrialGrid g;
  for (int n = 1; n <= n_max; ++n) {
    g.cells.push_back({"mcb", {{"l", n}, {"r", n}, {"g", std::uint64_t{1} << n}}});
  }
  g.trials = trials;
  g.seed = seed;
  return g;
}

TrialGrid trial_grid_from_json(const nlohmann::json& j) {
  TrialGrid g;
  for (const auto& c : j.at("cells")) {
    g.cells.push_back({c.at("method").get<std::string>(),
                       c.value("params", nlohmann::json::object())});
  }
  g.trials = j.value("trials", g.trials);
  g.repeats = j.value("repeats", g.repeats);
  g.seed = j.value("seed", g.seed);
  g.level = j.value("level", g.level);
  g.threads = j.value("threads", g.threads);
  g.validate();
  return g;
}

nlohmann::json to_json(const TrialGrid& grid) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : grid.cells) cells.push_back({{"method", c.method}, {"params", c.params}});
  return {{"cells", cells},        {"trials", grid.trials}, {"repeats", grid.repeats},
          {"seed", grid.seed},     {"level", grid.level},   {"threads", grid.threads}};
}

double lazy_path_minimum(LazyBridgePath& path, int level) {
  fill_dyadic(path, level);
  double best = path.points().front().second;
  for (const auto& [t, v] : path.points()) best = std::min(best, v);
  return best;
}

TrialResult run_trial(const BenchCell& cell, int level, std::uint64_t trial_seed) {
  const auto& p = cell.params;
  TrialResult out;
  if (cell.method == "naive-gss" || cell.method == "iter-gss") {
    const GssParams gss = gss_params_from_json(p);
    const GridPath path = fill_dyadic(trial_seed, level);
    const Oracle f = [&path](double t) { return path.at(t); };
    const SearchReport r = cell.method == "naive-gss"
                               ? golden_section(f, 0.0, 1.0, gss)
                               : iterative_gss(f, p.at("m").get<int>(), gss);
    out.error = r.min_value - path.grid_min().value;
    out.wall_time = r.wall_time;
    out.queries = static_cast<double>(r.queries);
  } else if (cell.method == "mcb") {
    McbParams mp;
    mp.l = p.at("l").get<int>();
    mp.r = p.at("r").get<int>();
    mp.g = p.at("g").get<std::uint64_t>();
    mp.seed = derive_seed(trial_seed, 1);
    mp.validate();
    const GridPath path = fill_dyadic(trial_seed, mp.l);
    const SearchReport r = mcb_search(path, mp);
    out.error = r.min_value - path.grid_min().value;
    out.wall_time = r.wall_time;
    out.queries = static_cast<double>(r.queries);
  } else if (cell.method == "harmonic" || cell.method == "random-bisection") {
    const auto budget = p.at("budget").get<std::size_t>();
    LazyBridgePath path(trial_seed, true);
    SearchReport r;
    if (cell.method == "harmonic") {
      HmcParams hp;
      hp.beta = p.value("beta", hp.beta);
      hp.strategy = strategy_from_string(p.value("strategy", std::string("max")));
      hp.solver = solver_kind_from_string(p.value("solver", std::string("full")));
      hp.seed = derive_seed(trial_seed, 1);
      r = harmonic_bisection_search(path, budget, hp);
    } else {
      r = random_bisection_search(path, budget, derive_seed(trial_seed, 1));
    }
    out.error = r.min_value - lazy_path_minimum(path, level);
    out.wall_time = r.wall_time;
    out.queries = static_cast<double>(r.queries);
  } else {
    throw std::invalid_argument("unknown bench method '" + cell.method + "'");
  }
  return out;
}

std::vector<BenchRow> run_grid(const TrialGrid& grid) {
  grid.validate();
  std::vector<BenchRow> rows;
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    const BenchCell& cell = grid.cells[c];
    for (std::size_t rep = 0; rep < grid.repeats; ++rep) {
      std::vector<TrialResult> results(grid.trials);
      std::vector<char> failed(grid.trials, 0);
      parallel_for(grid.trials, grid.threads, [&](std::size_t i) {
        try {
          results[i] = run_trial(cell, grid.level, derive_seed(grid.seed, c, rep, i));
        } catch (const std::invalid_argument&) {
          throw;
        } catch (const std::exception&) {
          failed[i] = 1;
        }
      });
      std::vector<double> err;
      std::vector<double> wall;
      std::vector<double> queries;
      for (std::size_t i = 0; i < grid.trials; ++i) {
        if (failed[i]) continue;
        err.push_back(results[i].error);
        wall.push_back(results[i].wall_time);
        queries.push_back(results[i].queries);
      }
      BenchRow row;
      row.method = cell.method;
      row.params = cell.params;
      row.cell = c;
      row.repeat = rep;
      row.trials = err.size();
      row.failures = grid.trials - err.size();
      row.flagged = static_cast<double>(row.failures) > 0.01 * static_cast<double>(grid.trials);
      row.seed = grid.seed;
      if (!err.empty()) {
        const double n = static_cast<double>(err.size());
        row.mean_error = pairwise_sum(err) / n;
        row.mean_wall_time = pairwise_sum(wall) / n;
        row.mean_queries = pairwise_sum(queries) / n;
        if (err.size() > 1) {
          std::vector<double> sq(err.size());
          for (std::size_t i = 0; i < err.size(); ++i) {
            sq[i] = (err[i] - row.mean_error) * (err[i] - row.mean_error);
          }
          row.stderr_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

nlohmann::json to_json(const BenchRow& row) {
  return {{"method", row.method},
          {"params", row.params},
          {"cell", row.cell},
          {"repeat", row.repeat},
          {"mean_error", row.mean_error},
          {"stderr_error", row.stderr_error},
          {"mean_wall_time", row.mean_wall_time},
          {"mean_queries", row.mean_queries},
          {"trials", row.trials},
          {"failures", row.failures},
          {"flagged", row.flagged},
          {"seed", row.seed}};
}

namespace {

std::string param_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return detail::format_double(v.get<double>());
  return v.dump();
}

}  // namespace

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out) {
  out << "method,params,cell,repeat,mean_error,stderr_error,mean_wall_time,mean_queries,"
         "trials,failures,flagged,seed\n";
  for (const auto& r : rows) {
    std::string params;
    for (const auto& [k, v] : r.params.items()) {
      if (!params.empty()) params += ';';
      params += k + '=' + param_text(v);
    }
    out << r.method << ',' << params << ',' << r.cell << ',' << r.repeat << ','
        << detail::format_double(r.mean_error) << ',' << detail::format_double(r.stderr_error)
        << ',' << detail::format_double(r.mean_wall_time) << ','
        << detail::format_double(r.mean_queries) << ',' << r.trials << ',' << r.failures << ','
        << (r.flagged ? 1 : 0) << ',' << r.seed << '\n';
  }
}

void write_bench_long_csv(std::span<const BenchRow> rows, std::ostream& out) {
  out << "method,cell,repeat,param,param_value,metric,value\n";
  for (const auto& r : rows) {
    const std::pair<const char*, double> metrics[] = {{"mean_error", r.mean_error},
                                                      {"stderr_error", r.stderr_error},
                                                      {"mean_wall_time", r.mean_wall_time},
                                                      {"mean_queries", r.mean_queries}};
    for (const auto& [k, v] : r.params.items()) {
      if (!v.is_number()) continue;
      for (const auto& [name, value] : metrics) {
        out << r.method << ',' << r.cell << ',' << r.repeat << ',' << k << ',' << param_text(v)
            << ',' << name << ',' << detail::format_double(value) << '\n';
      }
    }
  }
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman needs two samples of equal size >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("spearman of a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pathmin
