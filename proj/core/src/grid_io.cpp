#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "csv_util.hpp"
#include "pathmin/harmonic.hpp"
#include "pathmin/path_sim.hpp"

namespace pathmin {

void write_grid_csv(const GridPath& path, std::ostream& out) {
  out << "t,value\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << detail::format_double(path.time(k)) << ',' << detail::format_double(path.value(k))
        << '\n';
  }
}

nlohmann::json grid_metadata(const GridPath& path) {
  return {{"seed", path.seed()}, {"level", path.level()}, {"kind", to_string(path.kind())}};
}

GridPath read_grid_csv(std::istream& in, ProcessKind kind, std::uint64_t seed,
                       std::string_view source_name) {
  const auto fail = [&](std::size_t line_no, const std::string& what) {
    throw std::invalid_argument(std::string(source_name) + ":" + std::to_string(line_no) + ": " +
                                what);
  };
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(1, "empty file, expected header 't,value'");
  ++line_no;
  if (detail::trim(line) != "t,value") fail(line_no, "expected header 't,value'");

  std::vector<double> times, values;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 2) fail(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    const auto t = detail::parse_double(fields[0]);
    const auto v = detail::parse_double(fields[1]);
    if (!t || !v) fail(line_no, "malformed number");
    times.push_back(*t);
    values.push_back(*v);
  }
  const std::size_t n = values.size();
  if (n < 3 || ((n - 1) & (n - 2)) != 0) {
    fail(line_no, "row count " + std::to_string(n) + " is not 2^l + 1");
  }
  const int level = static_cast<int>(std::lround(std::log2(static_cast<double>(n - 1))));
  const double h = std::ldexp(1.0, -level);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(times[k] - static_cast<double>(k) * h) > 1e-12) {
      fail(k + 2, "time is not on the dyadic grid of level " + std::to_string(level));
    }
  }
  return GridPath(level, std::move(values), kind, seed);
}

WalkPolygon read_walk_csv(std::istream& in, double beta, std::string_view source_name) {
  const auto fail = [&](std::size_t line_no, const std::string& what) {
    throw std::invalid_argument(std::string(source_name) + ":" + std::to_string(line_no) + ": " +
                                what);
  };
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(1, "empty file, expected header 't,value'");
  ++line_no;
  if (detail::trim(line) != "t,value") fail(line_no, "expected header 't,value'");
  std::vector<double> times, values;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 2) fail(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
    const auto t = detail::parse_double(fields[0]);
    const auto v = detail::parse_double(fields[1]);
    if (!t || !v) fail(line_no, "malformed number");
    if (!std::isfinite(*t) || !std::isfinite(*v)) fail(line_no, "non-finite number");
    if (!times.empty() && !(*t > times.back())) fail(line_no, "times must increase strictly");
    times.push_back(*t);
    values.push_back(*v);
    lines.push_back(line_no);
  }
  if (times.size() < 2) fail(line_no, "walk needs at least two rows");
  if (times.front() != 0.0) fail(lines.front(), "first time must be 0");
  if (times.back() != 1.0) fail(lines.back(), "last time must be 1");
  if (values.front() != 0.0) fail(lines.front(), "walk must start at 0");
  if (values.back() != 0.0) fail(lines.back(), "walk must end at 0");
  return WalkPolygon(std::move(times), std::move(values), beta);
}

}  // namespace pathmin
