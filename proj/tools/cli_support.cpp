#include "cli_support.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <thread>

namespace pathmin::cli {

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + name + "'");
}

std::vector<std::string> config_to_args(const nlohmann::json& config) {
  if (!config.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : config.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag = "--" + flag;
    if (value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    if (value.is_object() || value.is_array()) {
      throw std::invalid_argument("config key '" + key + "' must be a scalar");
    }
    args.push_back(flag);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  return args;
}

std::string take_config_flag(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      --i;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      --i;
    }
  }
  return path;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

OutputFile::OutputFile(const std::string& path) : path_(path) {
  if (is_stdout()) return;
  file_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
  if (!*file_) throw IoError("cannot open '" + path_ + "' for writing");
}

OutputFile::~OutputFile() = default;

std::ostream& OutputFile::stream() { return file_ ? *file_ : std::cout; }

void OutputFile::close() {
  std::ostream& s = stream();
  s.flush();
  if (!s) throw IoError("writing '" + (is_stdout() ? std::string("<stdout>") : path_) + "' failed");
  if (file_) file_->close();
}

nlohmann::json metadata(const std::string& command, std::uint64_t seed,
                        const nlohmann::json& params) {
  return {{"tool", "pathmin"},
          {"version", PATHMIN_VERSION_STRING},
          {"command", command},
          {"seed", seed},
          {"params", params}};
}

void write_sidecar(const OutputFile& out, const nlohmann::json& meta) {
  if (out.is_stdout()) return;
  OutputFile side(out.path() + ".meta.json");
  side.stream() << meta.dump(2) << '\n';
  side.close();
}

void write_json_document(std::ostream& out, const nlohmann::json& meta, nlohmann::json data) {
  nlohmann::json doc = {{"meta", meta}};
  for (auto& [key, value] : data.items()) doc[key] = std::move(value);
  out << doc.dump(2) << '\n';
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace pathmin::cli
