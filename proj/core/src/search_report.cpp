#include "pathmin/search_report.hpp"

namespace pathmin {

nlohmann::json to_json(const SearchReport& r) {
  nlohmann::json j = {
      {"argmin_t", r.argmin_t},     {"min_value", r.min_value}, {"queries", r.queries},
      {"wall_time", r.wall_time},   {"method", r.method},       {"params", r.params},
      {"seed", r.seed},
  };
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
  if (!r.query_times.empty()) j["query_times"] = r.query_times;
  return j;
}

SearchReport search_report_from_json(const nlohmann::json& j) {
  SearchReport r;
  r.argmin_t = j.at("argmin_t").get<double>();
  r.min_value = j.at("min_value").get<double>();
  r.queries = j.at("queries").get<std::size_t>();
  r.wall_time = j.at("wall_time").get<double>();
  r.method = j.at("method").get<std::string>();
  r.params = j.value("params", nlohmann::json::object());
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<double>();
  if (j.contains("query_times")) r.query_times = j["query_times"].get<std::vector<double>>();
  return r;
}

}  // namespace pathmin
