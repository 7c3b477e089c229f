#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pathmin::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kUsageError = 2,
  kNumericalError = 3,
};

/// Raised for unreadable inputs and unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for numerical failures that are not the user's fault.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };
Format format_from_string(const std::string& name);

/// Arguments from a JSON config file as flags, placed before the command-line
/// flags so that the latter win. Keys are long flag names; underscores may
/// stand for dashes. true adds a bare flag, false and null add nothing.
std::vector<std::string> config_to_args(const nlohmann::json& config);

/// Moves "--config FILE" or "--config=FILE" out of args and returns the file
/// name, or an empty string.
std::string take_config_flag(std::vector<std::string>& args);

nlohmann::json read_json_file(const std::string& path);

/// Destination of one output: a file, or stdout when the path is empty or "-".
class OutputFile {
 public:
  explicit OutputFile(const std::string& path);
  ~OutputFile();
  std::ostream& stream();
  /// Flushes and throws IoError if any write failed.
  void close();
  bool is_stdout() const { return path_.empty() || path_ == "-"; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

/// Header every output carries: tool name and version, subcommand, seed and
/// the resolved parameters.
nlohmann::json metadata(const std::string& command, std::uint64_t seed,
                        const nlohmann::json& params);

/// Writes meta next to a CSV output as "<path>.meta.json". Does nothing for
/// stdout.
void write_sidecar(const OutputFile& out, const nlohmann::json& meta);

/// Writes {"meta": meta, ...data} with two-space indentation.
void write_json_document(std::ostream& out, const nlohmann::json& meta, nlohmann::json data);

unsigned default_threads();

}  // namespace pathmin::cli
