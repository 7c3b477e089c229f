#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <string>

#include "cli_support.hpp"
#include "pathmin/bench.hpp"
#include "pathmin/gss.hpp"
#include "pathmin/harmonic.hpp"
#include "pathmin/mcb.hpp"
#include "pathmin/path_sim.hpp"
#include "pathmin/sc_map.hpp"

namespace pathmin::cli {

namespace {

const std::vector<std::string> kKinds = {"bridge", "brownian_bridge", "motion", "brownian_motion",
                                         "brownian", "cauchy"};

void add_format(CLI::App& sub, std::string& format, std::string default_format) {
  format = std::move(default_format);
  sub.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_common(CLI::App& sub, std::uint64_t& seed, std::string& out, unsigned& threads) {
  sub.add_option("--seed", seed, "RNG seed")->capture_default_str();
  sub.add_option("--out", out, "Output file (stdout when omitted)");
  threads = default_threads();
  sub.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 4096u));
}

GridPath simulate_grid(ProcessKind kind, int level, std::uint64_t seed) {
  switch (kind) {
    case ProcessKind::brownian_bridge:
      return fill_dyadic(seed, level, true);
    case ProcessKind::brownian_motion:
      return fill_dyadic(seed, level, false);
    case ProcessKind::cauchy:
      return simulate_cauchy(seed, level);
  }
  throw std::logic_error("unhandled process kind");
}

GridPath load_grid(const std::string& file, ProcessKind kind, std::uint64_t seed) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file + "'");
  return read_grid_csv(in, kind, seed, file);
}

// ---------------------------------------------------------------------------

struct SimulateCommand : Command {
  std::string kind = "bridge";
  int level = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  unsigned threads = 1;

  explicit SimulateCommand(CLI::App& sub) {
    sub.add_option("--kind", kind, "Process: bridge, motion or cauchy")
        ->check(CLI::IsMember(kKinds))
        ->capture_default_str();
    sub.add_option("--level", level, "Grid level l (2^l + 1 points)")
        ->check(CLI::Range(1, 30))
        ->capture_default_str();
    add_common(sub, seed, out, threads);
    add_format(sub, format, "csv");
  }

  void run() override {
    const ProcessKind k = process_kind_from_string(kind);
    const GridPath path = simulate_grid(k, level, seed);
    nlohmann::json params = {{"kind", to_string(k)}, {"level", level}};
    const auto meta = metadata("simulate", seed, params);
    const auto& gm = path.grid_min();
    OutputFile file(out);
    if (format_from_string(format) == Format::csv) {
      write_grid_csv(path, file.stream());
      write_sidecar(file, meta);
    } else {
      std::vector<double> t(path.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = path.time(i);
      write_json_document(
          file.stream(), meta,
          {{"t", t},
           {"value", path.values()},
           {"grid_min", {{"index", gm.index}, {"time", gm.time}, {"value", gm.value}}}});
    }
    file.close();
  }
};

// ---------------------------------------------------------------------------

struct SearchCommand : Command {
  std::string method;
  std::string kind = "bridge";
  int level = 10;
  std::string path_file;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  unsigned threads = 1;
  GssParams gss;
  std::string stop_rule = "endpoint_shift";
  int m = 3;
  McbParams mcb;
  std::size_t budget = 65;
  double beta = 1.0;
  std::string strategy = "max";
  std::string solver = "full";

  explicit SearchCommand(CLI::App& sub) {
    sub.add_option("--method", method, "naive-gss, iter-gss, mcb, harmonic or random-bisection")
        ->required()
        ->check(CLI::IsMember({"naive-gss", "iter-gss", "mcb", "harmonic", "random-bisection"}));
    sub.add_option("--kind", kind, "Process of the simulated path")
        ->check(CLI::IsMember(kKinds))
        ->capture_default_str();
    sub.add_option("--level", level, "Grid level of the scoring path (mcb uses --l)")
        ->check(CLI::Range(1, 30))
        ->capture_default_str();
    sub.add_option("--path", path_file, "Search a grid path read from this CSV instead");
    sub.add_option("--epsilon", gss.epsilon, "Golden-section stopping tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--max-iters", gss.max_iters, "Golden-section iteration cap")
        ->check(CLI::Range(1, 1 << 30))
        ->capture_default_str();
    sub.add_option("--stop-rule", stop_rule, "endpoint_shift or endpoint_value")
        ->check(CLI::IsMember({"endpoint_shift", "endpoint_value"}))
        ->capture_default_str();
    sub.add_option("--m", m, "Iterative GSS partition exponent")
        ->check(CLI::Range(0, 20))
        ->capture_default_str();
    sub.add_option("--l", mcb.l, "MCB grid level")->check(CLI::Range(1, 30))->capture_default_str();
    sub.add_option("--r", mcb.r, "MCB descent depth")->check(CLI::Range(1, 30))->capture_default_str();
    sub.add_option("--g", mcb.g, "MCB descents")->check(CLI::PositiveNumber)->capture_default_str();
    sub.add_option("--budget", budget, "Bisection queries after the endpoints")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--beta", beta, "Height scale of the walk")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub.add_option("--strategy", strategy, "max or sample")
        ->check(CLI::IsMember({"max", "sample"}))
        ->capture_default_str();
    sub.add_option("--solver", solver, "full or perturbative")
        ->check(CLI::IsMember({"full", "perturbative"}))
        ->capture_default_str();
    add_common(sub, seed, out, threads);
    add_format(sub, format, "json");
  }

  nlohmann::json resolved_params() const {
    nlohmann::json p = {{"method", method}};
    if (!path_file.empty()) {
      p["path"] = path_file;
    } else {
      p["kind"] = kind;
    }
    if (method == "naive-gss" || method == "iter-gss") {
      p["level"] = level;
      p["epsilon"] = gss.epsilon;
      p["max_iters"] = gss.max_iters;
      p["stop_rule"] = stop_rule;
      if (method == "iter-gss") p["m"] = m;
    } else if (method == "mcb") {
      p["l"] = mcb.l;
      p["r"] = mcb.r;
      p["g"] = mcb.g;
    } else {
      p["level"] = level;
      p["budget"] = budget;
      if (method == "harmonic") {
        p["beta"] = beta;
        p["strategy"] = strategy;
        p["solver"] = solver;
      }
    }
    return p;
  }

  void run() override {
    const ProcessKind k = process_kind_from_string(kind);
    gss.stop_rule = stop_rule == "endpoint_value" ? GssStopRule::endpoint_value
                                                  : GssStopRule::endpoint_shift;
    SearchReport report;
    double reference = 0.0;
    if (method == "naive-gss" || method == "iter-gss") {
      const GridPath path = path_file.empty() ? simulate_grid(k, level, seed)
                                              : load_grid(path_file, k, seed);
      const Oracle f = [&path](double t) { return path.at(t); };
      report = method == "naive-gss" ? golden_section(f, 0.0, 1.0, gss) : iterative_gss(f, m, gss);
      report.method = method;
      reference = path.grid_min().value;
    } else if (method == "mcb") {
      mcb.seed = derive_seed(seed, 1);
      mcb.validate();
      const GridPath path = path_file.empty() ? simulate_grid(k, mcb.l, seed)
                                              : load_grid(path_file, k, seed);
      report = k == ProcessKind::cauchy ? mcb_search_cauchy(path, mcb) : mcb_search(path, mcb);
      reference = path.grid_min().value;
    } else {
      HmcParams hp;
      hp.beta = beta;
      hp.strategy = strategy_from_string(strategy);
      hp.solver = solver_kind_from_string(solver);
      hp.seed = derive_seed(seed, 1);
      const bool harmonic = method == "harmonic";
      if (path_file.empty()) {
        if (k != ProcessKind::brownian_bridge) {
          throw std::invalid_argument(method + " needs a pinned bridge (--kind bridge)");
        }
        LazyBridgePath path(seed, true);
        report = harmonic ? harmonic_bisection_search(path, budget, hp)
                          : random_bisection_search(path, budget, hp.seed);
        reference = lazy_path_minimum(path, level);
      } else {
        const GridPath path = load_grid(path_file, k, seed);
        const Oracle f = [&path](double t) { return path.at(t); };
        report = harmonic ? harmonic_bisection_search(f, budget, hp)
                          : random_bisection_search(f, budget, hp.seed);
        reference = path.grid_min().value;
      }
    }
    report.seed = seed;
    report.error = report.min_value - reference;

    const auto meta = metadata("search", seed, resolved_params());
    OutputFile file(out);
    if (format_from_string(format) == Format::csv) {
      auto& s = file.stream();
      s << "method,argmin_t,min_value,reference_min,error,queries,wall_time,seed\n";
      s << report.method << ',' << nlohmann::json(report.argmin_t).dump() << ','
        << nlohmann::json(report.min_value).dump() << ',' << nlohmann::json(reference).dump()
        << ',' << nlohmann::json(*report.error).dump() << ',' << report.queries << ','
        << nlohmann::json(report.wall_time).dump() << ',' << report.seed << '\n';
      write_sidecar(file, meta);
    } else {
      auto j = to_json(report);
      j["reference_min"] = reference;
      write_json_document(file.stream(), meta, {{"report", j}});
    }
    file.close();
  }
};

// ---------------------------------------------------------------------------

struct MeasureCommand : Command {
  std::string walk_file;
  double beta = 1.0;
  std::string solver = "full";
  std::size_t oracle = 0;
  HittingOracleParams hop;
  FullSolverOptions solver_options;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  unsigned threads = 1;

  explicit MeasureCommand(CLI::App& sub) {
    sub.add_option("--walk", walk_file, "Walk CSV with header t,value")->required();
    sub.add_option("--beta", beta, "Height scale of the walk")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub.add_option("--solver", solver, "full or perturbative")
        ->check(CLI::IsMember({"full", "perturbative"}))
        ->capture_default_str();
    sub.add_option("--tolerance", solver_options.tolerance, "Full-solver side-length tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--quadrature-order", solver_options.quadrature_order, "Gauss-Jacobi order")
        ->check(CLI::Range(4, 64))
        ->capture_default_str();
    sub.add_option("--oracle", oracle, "Also run the hitting oracle with this many walkers");
    sub.add_option("--dt", hop.dt, "Oracle time step")->check(CLI::PositiveNumber)->capture_default_str();
    sub.add_option("--depth", hop.depth, "Oracle start depth below the lowest vertex")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common(sub, seed, out, threads);
    add_format(sub, format, "csv");
  }

  void run() override {
    std::ifstream in(walk_file);
    if (!in) throw IoError("cannot open '" + walk_file + "'");
    const WalkPolygon poly = read_walk_csv(in, beta, walk_file);
    PreVertexSolution sol;
    try {
      sol = solve_prevertices(poly, solver_kind_from_string(solver), solver_options);
    } catch (const ScSolverError& e) {
      throw NumericalError(e.what());
    }
    const EdgeMeasures m = edge_measures(poly, sol);
    EdgeMeasures mc;
    if (oracle > 0) {
      hop.walkers = oracle;
      hop.seed = seed;
      hop.threads = threads;
      mc = mc_hitting_oracle(poly, hop);
    }
    nlohmann::json params = {{"walk", walk_file}, {"beta", beta}, {"solver", solver}};
    if (solver == "full") {
      params["tolerance"] = solver_options.tolerance;
      params["quadrature_order"] = solver_options.quadrature_order;
    }
    if (oracle > 0) {
      params["oracle_walkers"] = oracle;
      params["dt"] = hop.dt;
      params["depth"] = hop.depth;
    }
    const auto meta = metadata("measure", seed, params);
    OutputFile file(out);
    if (format_from_string(format) == Format::csv) {
      write_edge_measures_csv(m, file.stream(), oracle > 0 ? &mc : nullptr);
      write_sidecar(file, meta);
    } else {
      nlohmann::json edges = nlohmann::json::array();
      for (std::size_t k = 0; k < m.size(); ++k) {
        nlohmann::json e = {{"k", k},
                            {"t_left", m.t_left[k]},
                            {"t_right", m.t_right[k]},
                            {"weight", m.weights[k]}};
        if (oracle > 0) {
          e["oracle_weight"] = mc.weights[k];
          e["oracle_stderr"] = mc.stderrs[k];
        }
        edges.push_back(e);
      }
      write_json_document(file.stream(), meta, {{"edges", edges}, {"prevertices", to_json(sol)}});
    }
    file.close();
  }
};

// ---------------------------------------------------------------------------

struct BenchCommand : Command {
  std::string grid_file;
  std::string preset = "gss";
  std::size_t trials = 500;
  std::size_t repeats = 1;
  int level = 10;
  int m_max = 8;
  int n_max = 14;
  std::size_t budget = 65;
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  unsigned threads = 1;
  bool long_format = false;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* repeats_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* level_opt = nullptr;

  explicit BenchCommand(CLI::App& sub) {
    sub.add_option("--grid", grid_file, "Trial grid JSON (cells, trials, seed, level, ...)");
    sub.add_option("--preset", preset, "gss, iter-gss, mcb or harmonic when no --grid is given")
        ->check(CLI::IsMember({"gss", "iter-gss", "mcb", "harmonic"}))
        ->capture_default_str();
    trials_opt = sub.add_option("--trials", trials, "Trials per cell")
                     ->check(CLI::PositiveNumber)
                     ->capture_default_str();
    repeats_opt = sub.add_option("--repeats", repeats, "Repetitions of every cell")
                      ->check(CLI::PositiveNumber)
                      ->capture_default_str();
    level_opt = sub.add_option("--level", level, "Path level for non-mcb cells")
                    ->check(CLI::Range(1, 30))
                    ->capture_default_str();
    sub.add_option("--m-max", m_max, "Largest iterative GSS exponent in the presets")
        ->check(CLI::Range(0, 20))
        ->capture_default_str();
    sub.add_option("--n-max", n_max, "Largest n of the mcb preset")
        ->check(CLI::Range(1, 24))
        ->capture_default_str();
    sub.add_option("--budget", budget, "Query budget of the harmonic preset")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--beta", beta, "Height scale of the harmonic preset")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub.add_flag("--long", long_format, "Long-format CSV, one metric per line");
    seed_opt = sub.add_option("--seed", seed, "RNG seed")->capture_default_str();
    sub.add_option("--out", out, "Output file (stdout when omitted)");
    threads = default_threads();
    sub.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 4096u));
    add_format(sub, format, "csv");
  }

  TrialGrid preset_grid() const {
    TrialGrid g;
    if (preset == "mcb") {
      g = TrialGrid::mcb_scaling(n_max, trials, seed);
    } else if (preset == "iter-gss") {
      g = TrialGrid::iterative_gss(m_max, trials, seed);
    } else if (preset == "gss") {
      g = TrialGrid::iterative_gss(m_max, trials, seed);
      g.cells.insert(g.cells.begin(), BenchCell{"naive-gss", nlohmann::json::object()});
    } else {
      g.trials = trials;
      g.seed = seed;
      g.cells = {
          BenchCell{"harmonic",
                    {{"budget", budget}, {"beta", beta}, {"strategy", "sample"}, {"solver", "full"}}},
          BenchCell{"harmonic",
                    {{"budget", budget}, {"beta", beta}, {"strategy", "max"}, {"solver", "full"}}},
          BenchCell{"random-bisection", {{"budget", budget}}},
      };
    }
    return g;
  }

  void run() override {
    TrialGrid grid;
    if (!grid_file.empty()) {
      grid = trial_grid_from_json(read_json_file(grid_file));
      if (trials_opt->count() > 0) grid.trials = trials;
      if (seed_opt->count() > 0) grid.seed = seed;
    } else {
      grid = preset_grid();
    }
    if (grid_file.empty() || repeats_opt->count() > 0) grid.repeats = repeats;
    if (grid_file.empty() || level_opt->count() > 0) grid.level = level;
    grid.threads = threads;
    grid.validate();
    const auto rows = run_grid(grid);

    nlohmann::json params = to_json(grid);
    params.erase("threads");
    if (grid_file.empty()) params["preset"] = preset;
    const auto meta = metadata("bench", grid.seed, params);
    OutputFile file(out);
    if (format_from_string(format) == Format::csv) {
      if (long_format) {
        write_bench_long_csv(rows, file.stream());
      } else {
        write_bench_csv(rows, file.stream());
      }
      write_sidecar(file, meta);
    } else {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) j.push_back(to_json(r));
      write_json_document(file.stream(), meta, {{"rows", j}});
    }
    file.close();
  }
};

// ---------------------------------------------------------------------------

struct RangeCommand : Command {
  std::string kind = "bridge";
  int level = 10;
  std::size_t paths = 10000;
  std::size_t bins = 50;
  std::uint64_t seed = 0;
  std::string out;
  std::string samples_out;
  std::string format;
  unsigned threads = 1;

  explicit RangeCommand(CLI::App& sub) {
    sub.add_option("--kind", kind, "Process: bridge, motion or cauchy")
        ->check(CLI::IsMember(kKinds))
        ->capture_default_str();
    sub.add_option("--level", level, "Grid level")->check(CLI::Range(1, 30))->capture_default_str();
    sub.add_option("--paths", paths, "Number of paths")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub.add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber)->capture_default_str();
    sub.add_option("--samples-out", samples_out, "Also write path,range,gap samples here");
    add_common(sub, seed, out, threads);
    add_format(sub, format, "csv");
  }

  void run() override {
    const ProcessKind k = process_kind_from_string(kind);
    const RangeDistribution d = range_distribution(k, level, paths, bins, seed, threads);
    nlohmann::json params = {
        {"kind", to_string(k)}, {"level", level}, {"paths", paths}, {"bins", bins}};
    const auto meta = metadata("range", seed, params);
    OutputFile file(out);
    if (format_from_string(format) == Format::csv) {
      write_range_histogram_csv(d, file.stream());
      write_sidecar(file, meta);
    } else {
      write_json_document(file.stream(), meta,
                          {{"bin_edges", d.bin_edges},
                           {"density", d.density},
                           {"mean_range", d.mean_range()},
                           {"median_range", d.range_quantile(0.5)},
                           {"q99_range", d.range_quantile(0.99)}});
    }
    file.close();
    if (!samples_out.empty()) {
      OutputFile samples(samples_out);
      write_range_samples_csv(d, samples.stream());
      write_sidecar(samples, meta);
      samples.close();
    }
  }
};

template <class C>
std::pair<CLI::App*, std::unique_ptr<Command>> make(CLI::App& app, const char* name,
                                                    const char* description) {
  CLI::App* sub = app.add_subcommand(name, description);
  return {sub, std::make_unique<C>(*sub)};
}

}  // namespace

std::vector<std::pair<CLI::App*, std::unique_ptr<Command>>> register_commands(CLI::App& app) {
  std::vector<std::pair<CLI::App*, std::unique_ptr<Command>>> out;
  out.push_back(make<SimulateCommand>(app, "simulate", "Simulate a grid path and write it as CSV"));
  out.push_back(make<SearchCommand>(app, "search", "Run one minimum search on a path"));
  out.push_back(make<MeasureCommand>(app, "measure", "Edge harmonic measures of a walk"));
  out.push_back(make<BenchCommand>(app, "bench", "Run a benchmark trial grid"));
  out.push_back(make<RangeCommand>(app, "range", "Distribution of max minus min of paths"));
  return out;
}

}  // namespace pathmin::cli
