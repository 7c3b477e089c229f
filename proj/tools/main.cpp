#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "commands.hpp"
#include "pathmin/sc_map.hpp"

namespace {

int run(std::vector<std::string> args) {
  using namespace pathmin::cli;
  CLI::App app{"Query-budgeted minimum search over stochastic paths", "pathmin"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", PATHMIN_VERSION_STRING);
  app.require_subcommand(1);
  auto commands = register_commands(app);

  const std::string config = take_config_flag(args);
  if (!config.empty()) {
    if (args.size() < 2 || args[1].empty() || args[1][0] == '-') {
      throw std::invalid_argument("--config must follow a subcommand");
    }
    const auto extra = config_to_args(read_json_file(config));
    args.insert(args.begin() + 2, extra.begin(), extra.end());
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }
  for (auto& [sub, command] : commands) {
    if (sub->parsed()) command->run();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pathmin::cli;
  std::vector<std::string> args(argv, argv + argc);
  try {
    return run(std::move(args));
  } catch (const IoError& e) {
    std::cerr << "pathmin: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pathmin: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    std::cerr << "pathmin: " << e.what() << '\n';
    return kUsageError;
  } catch (const pathmin::ScSolverError& e) {
    std::cerr << "pathmin: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "pathmin: " << e.what() << '\n';
    return kNumericalError;
  }
}
