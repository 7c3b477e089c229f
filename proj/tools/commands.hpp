#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace CLI {
class App;
}

namespace pathmin::cli {

/// A subcommand registered on the top-level app; run() is called when it was
/// the one selected.
struct Command {
  virtual ~Command() = default;
  virtual void run() = 0;
};

/// Adds simulate, search, measure, bench and range to app.
std::vector<std::pair<CLI::App*, std::unique_ptr<Command>>> register_commands(CLI::App& app);

}  // namespace pathmin::cli
