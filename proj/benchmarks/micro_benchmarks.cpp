#include <benchmark/benchmark.h>

#include <cmath>

#include "pathmin/gss.hpp"
#include "pathmin/harmonic.hpp"
#include "pathmin/mcb.hpp"
#include "pathmin/path_sim.hpp"
#include "pathmin/sc_map.hpp"

using namespace pathmin;

namespace {

WalkPolygon brownian_walk(std::uint64_t seed, int level, double beta) {
  const auto g = fill_dyadic(seed, level);
  std::vector<double> t(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) t[k] = g.time(k);
  return WalkPolygon(t, std::vector<double>(g.values().begin(), g.values().end()), beta);
}

void BM_LazyBridgeQuery(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto path = new_bridge(seed++, true);
    CounterRng rng(seed);
    for (int i = 0; i < state.range(0); ++i) benchmark::DoNotOptimize(path.query(rng.uniform()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LazyBridgeQuery)->Arg(64)->Arg(1024);

void BM_FillDyadic(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fill_dyadic(seed++, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_FillDyadic)->Arg(10)->Arg(14);

void BM_SimulateCauchy(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_cauchy(seed++, 10));
}
BENCHMARK(BM_SimulateCauchy);

void BM_IterativeGss(benchmark::State& state) {
  const auto grid = fill_dyadic(1, 10);
  const Oracle f = [&grid](double t) { return grid.at(t); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterative_gss(f, static_cast<int>(state.range(0)), GssParams{}));
  }
}
BENCHMARK(BM_IterativeGss)->Arg(1)->Arg(8);

void BM_McbSearch(benchmark::State& state) {
  const auto grid = fill_dyadic(1, 10);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mcb_search(grid, McbParams{.l = 10, .r = 10, .g = static_cast<std::uint64_t>(state.range(0)), .seed = seed++}));
  }
}
BENCHMARK(BM_McbSearch)->Arg(1024)->Arg(16384);

void BM_CauchyBridgeSample(benchmark::State& state) {
  const CauchyBridgeCdf c(1.5);
  CounterRng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(cauchy_bridge_sample(c, rng.uniform_open()));
}
BENCHMARK(BM_CauchyBridgeSample);

void BM_FullScSolve(benchmark::State& state) {
  const auto poly = brownian_walk(2, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_prevertices_full(poly));
}
BENCHMARK(BM_FullScSolve)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_PerturbativeSolve(benchmark::State& state) {
  const auto poly = brownian_walk(2, 5, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(solve_prevertices_perturbative(poly));
}
BENCHMARK(BM_PerturbativeSolve)->Unit(benchmark::kMicrosecond);

void BM_HarmonicSearch(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto path = new_bridge(seed++, true);
    benchmark::DoNotOptimize(
        harmonic_bisection_search(path, static_cast<std::size_t>(state.range(0)), HmcParams{}));
  }
}
BENCHMARK(BM_HarmonicSearch)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_HittingOracle(benchmark::State& state) {
  const auto poly = brownian_walk(4, 3, 0.5);
  HittingOracleParams p;
  p.walkers = 1000;
  for (auto _ : state) {
    p.seed++;
    benchmark::DoNotOptimize(mc_hitting_oracle(poly, p));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_HittingOracle)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
