#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("pathmin_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + PATHMIN_CLI_PATH + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

// Drops the named CSV column from every line.
std::string drop_column(const std::string& csv, const std::string& name) {
  const auto rows = lines(csv);
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    std::vector<std::string> c;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) c.push_back(cell);
    cells.push_back(c);
  }
  std::size_t skip = cells.empty() ? 0 : cells[0].size();
  for (std::size_t i = 0; !cells.empty() && i < cells[0].size(); ++i) {
    if (cells[0][i] == name) skip = i;
  }
  std::string out;
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i != skip) out += c[i] + ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(run("--version").code, 0);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(CliTest, SimulateWritesGridAndSidecar) {
  const auto r = run("simulate --level 3 --seed 5 --out " + path("a.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(path("a.csv")));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], "t,value");
  EXPECT_EQ(rows[1], "0,0");
  EXPECT_EQ(rows[9], "1,0");
  const auto meta = nlohmann::json::parse(slurp(path("a.csv.meta.json")));
  EXPECT_EQ(meta["seed"], 5);
  EXPECT_EQ(meta["command"], "simulate");
  EXPECT_EQ(meta["params"]["level"], 3);
}

TEST_F(CliTest, SimulateIsByteReproducible) {
  for (const std::string kind : {"bridge", "motion", "cauchy"}) {
    ASSERT_EQ(run("simulate --kind " + kind + " --level 8 --seed 11 --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run("simulate --kind " + kind + " --level 8 --seed 11 --out " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv"))) << kind;
    ASSERT_EQ(run("simulate --kind " + kind + " --level 8 --seed 12 --out " + path("c.csv")).code, 0);
    EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv"))) << kind;
  }
}

TEST_F(CliTest, SimulateRejectsBadLevel) {
  const auto r = run("simulate --level 0");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, SearchMcbQueryCount) {
  const auto r = run("search --method mcb --l 10 --r 10 --g 1024 --seed 7 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["report"]["queries"], 1026);
  EXPECT_EQ(j["meta"]["seed"], 7);
}

TEST_F(CliTest, SearchHarmonicFlatSequence) {
  const auto r = run("search --method harmonic --beta 0 --strategy max --budget 9 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const std::vector<double> expect = {0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875, 0.0625, 0.1875};
  EXPECT_EQ(j["report"]["query_times"].get<std::vector<double>>(), expect);
  EXPECT_EQ(j["report"]["queries"], 11);
}

TEST_F(CliTest, SearchIsReproducibleAcrossMethods) {
  for (const std::string method : {"naive-gss", "iter-gss --m 4", "mcb", "harmonic --budget 10",
                                   "random-bisection --budget 10"}) {
    const auto a = run("search --format csv --method " + method + " --seed 3");
    const auto b = run("search --format csv --method " + method + " --seed 3");
    ASSERT_EQ(a.code, 0) << method << a.err;
    EXPECT_EQ(drop_column(a.out, "wall_time"), drop_column(b.out, "wall_time")) << method;
  }
}

TEST_F(CliTest, SearchOnGivenPath) {
  ASSERT_EQ(run("simulate --level 6 --seed 2 --out " + path("p.csv")).code, 0);
  const auto r = run("search --method iter-gss --m 3 --path " + path("p.csv") + " --level 6");
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, MeasureFlatWalk) {
  write("w.csv", "t,value\n0,0\n0.25,0\n0.5,0\n0.75,0\n1,0\n");
  const auto r = run("measure --walk " + path("w.csv") + " --beta 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].rfind("k,t_left,t_right,weight,stderr", 0), 0u);
}

TEST_F(CliTest, MeasureErrors) {
  EXPECT_EQ(run("measure --walk " + path("missing.csv")).code, 1);
  write("bad.csv", "t,value\n0,0\n0.5,oops\n1,0\n");
  const auto r = run("measure --walk " + path("bad.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.csv:3"), std::string::npos) << r.err;
  EXPECT_EQ(run("measure").code, 2);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  EXPECT_EQ(run("simulate --level 2 --out " + path("no/such/dir/x.csv")).code, 1);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  write("cfg.json", R"({"level": 4, "seed": 9})");
  ASSERT_EQ(run("simulate --config " + path("cfg.json") + " --out " + path("a.csv")).code, 0);
  EXPECT_EQ(lines(slurp(path("a.csv"))).size(), 18u);
  ASSERT_EQ(run("simulate --config " + path("cfg.json") + " --level 2 --out " + path("b.csv")).code, 0);
  EXPECT_EQ(lines(slurp(path("b.csv"))).size(), 6u);
  write("bad.json", R"({"levle": 4})");
  EXPECT_EQ(run("simulate --config " + path("bad.json")).code, 2);
}

TEST_F(CliTest, BenchReproducibleDataColumns) {
  const std::string args = "bench --preset mcb --n-max 4 --trials 20 --seed 5 --out ";
  ASSERT_EQ(run(args + path("a.csv")).code, 0);
  ASSERT_EQ(run(args + path("b.csv") + " --threads 2").code, 0);
  const auto a = drop_column(slurp(path("a.csv")), "mean_wall_time");
  EXPECT_EQ(a, drop_column(slurp(path("b.csv")), "mean_wall_time"));
  EXPECT_EQ(lines(a).size(), 5u);
}

TEST_F(CliTest, RangeReproducible) {
  const std::string args = "range --kind cauchy --level 6 --paths 200 --bins 10 --seed 3 --out ";
  ASSERT_EQ(run(args + path("a.csv") + " --samples-out " + path("as.csv")).code, 0);
  ASSERT_EQ(run(args + path("b.csv") + " --samples-out " + path("bs.csv")).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("as.csv")), slurp(path("bs.csv")));
  EXPECT_EQ(lines(slurp(path("as.csv"))).size(), 201u);
}
