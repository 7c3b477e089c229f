#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pathmin {

/// Query oracle: returns the path value at a time in [0, 1].
using Oracle = std::function<double(double)>;

/// Outcome of one minimum search.
struct SearchReport {
  double argmin_t = 0.0;
  double min_value = 0.0;
  std::size_t queries = 0;   ///< oracle evaluations charged to the method
  double wall_time = 0.0;    ///< seconds spent inside the search call
  std::string method;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::optional<double> error;      ///< |min_value - grid minimum| when known
  std::vector<double> query_times;  ///< query order, recorded by some methods
};

nlohmann::json to_json(const SearchReport& report);
SearchReport search_report_from_json(const nlohmann::json& j);

/// Monotonic wall-clock stopwatch.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace pathmin
