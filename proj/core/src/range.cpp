#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "csv_util.hpp"
#include "pathmin/bench.hpp"

namespace pathmin {

double RangeDistribution::mean_range() const {
  std::vector<double> r(samples.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = samples[i].range;
  return r.empty() ? 0.0 : pairwise_sum(r) / static_cast<double>(r.size());
}

double RangeDistribution::range_quantile(double p) const {
  if (samples.empty()) throw std::logic_error("empty range sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
  std::vector<double> r(samples.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = samples[i].range;
  std::sort(r.begin(), r.end());
  const double pos = p * static_cast<double>(r.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, r.size() - 1);
  return r[lo] + (pos - static_cast<double>(lo)) * (r[hi] - r[lo]);
}

RangeDistribution range_distribution(ProcessKind kind, int level, std::size_t paths,
                                     std::size_t bins, std::uint64_t seed, unsigned threads) {
  if (paths < 1) throw std::invalid_argument("range distribution needs at least one path");
  if (bins < 1) throw std::invalid_argument("range histogram needs at least one bin");
  RangeDistribution d;
  d.kind = kind;
  d.level = level;
  d.seed = seed;
  d.samples.resize(paths);
  parallel_for(paths, threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    const GridPath path = kind == ProcessKind::cauchy
                              ? simulate_cauchy(s, level)
                              : fill_dyadic(s, level, kind == ProcessKind::brownian_bridge);
    const GridMin lo = path.grid_min();
    const GridMin hi = path.grid_max();
    d.samples[i] = {hi.value - lo.value, std::abs(hi.time - lo.time)};
  });

  double top = 0.0;
  for (const auto& s : d.samples) top = std::max(top, s.range);
  if (top == 0.0) top = 1.0;
  d.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    d.bin_edges[b] = top * static_cast<double>(b) / static_cast<double>(bins);
  }
  d.bin_edges.back() = top;
  std::vector<std::size_t> counts(bins, 0);
  for (const auto& s : d.samples) {
    auto b = static_cast<std::size_t>(s.range / top * static_cast<double>(bins));
    ++counts[std::min(b, bins - 1)];
  }
  const double width = top / static_cast<double>(bins);
  d.density.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    d.density[b] = static_cast<double>(counts[b]) / (static_cast<double>(paths) * width);
  }
  return d;
}

void write_range_histogram_csv(const RangeDistribution& d, std::ostream& out) {
  out << "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b < d.density.size(); ++b) {
    out << detail::format_double(d.bin_edges[b]) << ',' << detail::format_double(d.bin_edges[b + 1])
        << ',' << detail::format_double(d.density[b]) << '\n';
  }
}

void write_range_samples_csv(const RangeDistribution& d, std::ostream& out) {
  out << "path,range,gap\n";
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    out << i << ',' << detail::format_double(d.samples[i].range) << ','
        << detail::format_double(d.samples[i].gap) << '\n';
  }
}

}  // namespace pathmin
