#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "pathmin/bench.hpp"

using namespace pathmin;

TEST(Spearman, KnownValues) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> up = {10, 20, 25, 40, 100};
  const std::vector<double> down = {5, 4, 3, 2, 1};
  EXPECT_NEAR(spearman(x, up), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, down), -1.0, 1e-15);
  // Ties get average ranks (1.5, 1.5, 3, 4, 5); Pearson on ranks gives 9.5 / sqrt(95).
  const std::vector<double> tied = {1, 1, 2, 3, 4};
  EXPECT_NEAR(spearman(x, tied), 9.5 / std::sqrt(95.0), 1e-15);
  const std::vector<double> y = {2, 1, 4, 3, 5};
  // 1 - 6 * sum d^2 / (n (n^2 - 1)) with sum d^2 = 4.
  EXPECT_NEAR(spearman(x, y), 1.0 - 6.0 * 4.0 / (5.0 * 24.0), 1e-15);
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(PairwiseSum, MatchesAccumulateOnIntegers) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(257, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(RunGrid, ReproducibleExceptWallTime) {
  TrialGrid grid;
  grid.cells = {{"naive-gss", nlohmann::json::object()}, {"iter-gss", {{"m", 2}}}, {"mcb", {{"l", 6}, {"r", 6}, {"g", 64}}},
                {"harmonic", {{"budget", 8}, {"beta", 1.0}}}, {"random-bisection", {{"budget", 8}}}};
  grid.trials = 6;
  grid.seed = 3;
  grid.level = 8;
  const auto a = run_grid(grid);
  grid.threads = 3;
  const auto b = run_grid(grid);
  ASSERT_EQ(a.size(), grid.cells.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_error, b[i].mean_error);
    EXPECT_EQ(a[i].stderr_error, b[i].stderr_error);
    EXPECT_EQ(a[i].mean_queries, b[i].mean_queries);
    EXPECT_EQ(a[i].trials, 6u);
    EXPECT_EQ(a[i].failures, 0u);
    EXPECT_FALSE(a[i].flagged);
    EXPECT_GE(a[i].mean_error, 0.0);
  }
  EXPECT_EQ(a[2].mean_queries, 66.0);
  EXPECT_EQ(a[3].mean_queries, 10.0);
}

TEST(RunGrid, RepeatsAreIndependentRows) {
  TrialGrid grid;
  grid.cells = {{"iter-gss", {{"m", 1}}}};
  grid.trials = 5;
  grid.repeats = 3;
  const auto rows = run_grid(grid);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].repeat, 2u);
  EXPECT_NE(rows[0].mean_error, rows[1].mean_error);
}

TEST(RunGrid, PresetsAndJson) {
  const auto g = TrialGrid::mcb_scaling(4, 10, 1);
  ASSERT_EQ(g.cells.size(), 4u);
  EXPECT_EQ(g.cells[3].params["g"], 16);
  EXPECT_EQ(g.cells[3].params["l"], 4);
  const auto h = trial_grid_from_json(to_json(g));
  EXPECT_EQ(h.cells.size(), 4u);
  EXPECT_EQ(h.trials, 10u);
  EXPECT_EQ(TrialGrid::iterative_gss(8, 5, 0).cells.size(), 8u);
  TrialGrid bad;
  bad.cells = {{"simplex", nlohmann::json::object()}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(RunTrial, McbUsesItsOwnLevel) {
  const auto r = run_trial({"mcb", {{"l", 5}, {"r", 5}, {"g", 1000}}}, 10, 7);
  EXPECT_EQ(r.queries, 1002.0);
  EXPECT_GE(r.error, 0.0);
}

TEST(BenchCsv, HeaderAndRows) {
  TrialGrid grid;
  grid.cells = {{"iter-gss", {{"m", 1}}}};
  grid.trials = 3;
  const auto rows = run_grid(grid);
  std::stringstream out;
  write_bench_csv(rows, out);
  std::string header;
  std::getline(out, header);
  EXPECT_EQ(header,
            "method,params,cell,repeat,mean_error,stderr_error,mean_wall_time,mean_queries,trials,"
            "failures,flagged,seed");
  std::stringstream longform;
  write_bench_long_csv(rows, longform);
  std::getline(longform, header);
  EXPECT_EQ(header, "method,cell,repeat,param,param_value,metric,value");
}

TEST(Range, DistributionBasics) {
  const auto d = range_distribution(ProcessKind::brownian_bridge, 6, 500, 20, 4);
  EXPECT_EQ(d.samples.size(), 500u);
  EXPECT_EQ(d.bin_edges.size(), 21u);
  double mass = 0.0;
  for (std::size_t i = 0; i < d.density.size(); ++i) {
    mass += d.density[i] * (d.bin_edges[i + 1] - d.bin_edges[i]);
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
  for (const auto& s : d.samples) {
    EXPECT_GT(s.range, 0.0);
    EXPECT_GE(s.gap, 0.0);
    EXPECT_LE(s.gap, 1.0);
  }
  EXPECT_LE(d.range_quantile(0.0), d.range_quantile(0.5));
  EXPECT_LE(d.range_quantile(0.5), d.range_quantile(1.0));
  const auto e = range_distribution(ProcessKind::brownian_bridge, 6, 500, 20, 4, 3);
  EXPECT_EQ(d.mean_range(), e.mean_range());
}

TEST(Range, LazyPathMinimumCoversGrid) {
  auto path = new_bridge(5, true);
  path.query(0.3);
  const double m = lazy_path_minimum(path, 6);
  const auto grid = fill_dyadic(5, 6);
  EXPECT_LE(m, grid.grid_min().value + 0.0);
  EXPECT_EQ(path.size(), 66u);
}
