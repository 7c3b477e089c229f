#include "pathmin/mcb.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pathmin {

void McbParams::validate() const {
  if (l < 1 || l > 30) throw std::invalid_argument("MCB level l must be in [1, 30]");
  if (r < 1 || r > l) throw std::invalid_argument("MCB depth r must satisfy 1 <= r <= l");
  if (g < 1) throw std::invalid_argument("MCB descent count g must be at least 1");
}

nlohmann::json to_json(const McbParams& p) {
  return {{"l", p.l}, {"r", p.r}, {"g", p.g}};
}

bool BitSource::next() {
  if (remaining_ == 0) {
    word_ = (*rng_)();
    remaining_ = 64;
  }
  ++consumed_;
  --remaining_;
  const bool bit = (word_ >> 63) != 0;
  word_ <<= 1;
  return bit;
}

std::uint64_t mcb_descent_cell(int r, BitSource& bits) {
  std::uint64_t leaf = 0;
  for (int d = 0; d < r; ++d) leaf = (leaf << 1) | (bits.next() ? 1u : 0u);
  return leaf;
}

double mcb_descent(int r, BitSource& bits) {
  const std::uint64_t leaf = mcb_descent_cell(r, bits);
  return std::ldexp(static_cast<double>(2 * leaf + 1), -(r + 1));
}

double mcb_descent(const McbParams& params, CounterRng& rng) {
  params.validate();
  BitSource bits(rng);
  return mcb_descent(params.r, bits);
}

std::size_t mcb_leaf_node(std::uint64_t leaf, int r, int l) {
  if (r < l) return static_cast<std::size_t>((2 * leaf + 1) << (l - r - 1));
  return static_cast<std::size_t>(leaf);
}

SearchReport mcb_search(const GridPath& path, const McbParams& params, McbTrace* trace) {
  params.validate();
  if (path.level() != params.l) {
    throw std::invalid_argument("MCB level " + std::to_string(params.l) +
                                " does not match grid level " + std::to_string(path.level()));
  }
  Stopwatch clock;
  const std::size_t last = path.cells();
  std::vector<bool> seen(path.size(), false);
  std::size_t best_node = 0;
  double best_value = std::numeric_limits<double>::infinity();
  const auto charge = [&](std::size_t node) {
    seen[node] = true;
    if (path.value(node) < best_value) {
      best_value = path.value(node);
      best_node = node;
    }
  };
  charge(0);
  charge(last);

  if (trace) {
    *trace = McbTrace{};
    trace->leaf_visits.assign(std::size_t{1} << params.r, 0);
    trace->running_min.reserve(params.g);
  }
  std::uint64_t bits_used = 0;
  for (std::uint64_t i = 0; i < params.g; ++i) {
    CounterRng rng(params.seed, i);
    BitSource bits(rng);
    const std::uint64_t leaf = mcb_descent_cell(params.r, bits);
    bits_used += bits.consumed();
    charge(mcb_leaf_node(leaf, params.r, params.l));
    if (trace) {
      ++trace->leaf_visits[leaf];
      trace->running_min.push_back(best_value);
    }
  }

  SearchReport report;
  report.argmin_t = path.time(best_node);
  report.min_value = best_value;
  report.queries = static_cast<std::size_t>(params.g) + 2;
  report.method = path.kind() == ProcessKind::cauchy ? "mcb-cauchy" : "mcb";
  report.params = to_json(params);
  std::size_t distinct = 0;
  for (bool s : seen) distinct += s ? 1 : 0;
  report.params["distinct_nodes"] = distinct;
  report.seed = params.seed;
  report.error = std::abs(best_value - path.grid_min().value);
  report.wall_time = clock.seconds();
  if (trace) {
    trace->bits_consumed = bits_used;
    trace->distinct_nodes = distinct;
  }
  return report;
}

SearchReport mcb_search_cauchy(const GridPath& path, const McbParams& params, McbTrace* trace) {
  if (path.kind() != ProcessKind::cauchy) {
    throw std::invalid_argument("mcb_search_cauchy needs a Cauchy grid path");
  }
  return mcb_search(path, params, trace);
}

}  // namespace pathmin
