#pragma once

#include <cstdint>
#include <vector>

#include "pathmin/path_sim.hpp"
#include "pathmin/rng.hpp"
#include "pathmin/search_report.hpp"

namespace pathmin {

/// Monte Carlo bisection parameters: grid level l, descent depth r <= l,
/// number of descents g.
struct McbParams {
  int l = 10;
  int r = 10;
  std::uint64_t g = 1024;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const McbParams& p);

/// Fair bits drawn 64 at a time from a generator, with a consumption count.
class BitSource {
 public:
  explicit BitSource(CounterRng& rng) : rng_(&rng) {}
  bool next();
  std::uint64_t consumed() const { return consumed_; }

 private:
  CounterRng* rng_;
  std::uint64_t word_ = 0;
  int remaining_ = 0;
  std::uint64_t consumed_ = 0;
};

/// Leaf index j in [0, 2^r) reached by r random halvings of [0, 1]; bit 0
/// keeps the left half, bit 1 the right half, first bit most significant.
std::uint64_t mcb_descent_cell(int r, BitSource& bits);

/// Midpoint (2j + 1) / 2^(r+1) of the leaf reached by one descent.
double mcb_descent(int r, BitSource& bits);
double mcb_descent(const McbParams& params, CounterRng& rng);

/// Grid node charged for a leaf: the midpoint itself when r < l, otherwise the
/// left node of the grid cell that contains it.
std::size_t mcb_leaf_node(std::uint64_t leaf, int r, int l);

/// Optional diagnostics of an MCB run.
struct McbTrace {
  std::uint64_t bits_consumed = 0;
  std::vector<std::uint64_t> leaf_visits;  ///< size 2^r
  std::vector<double> running_min;         ///< after each descent
  std::size_t distinct_nodes = 0;          ///< endpoints included
};

/// Runs g independent descents (descent i draws from stream i of the seed)
/// and returns the minimum over the two endpoints and every charged node.
/// queries = g + 2.
SearchReport mcb_search(const GridPath& path, const McbParams& params, McbTrace* trace = nullptr);

/// mcb_search restricted to Cauchy grid paths.
SearchReport mcb_search_cauchy(const GridPath& path, const McbParams& params,
                               McbTrace* trace = nullptr);

}  // namespace pathmin
