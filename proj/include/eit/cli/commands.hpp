#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "eit/cli/config.hpp"

namespace eit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitValidation = 4,
};

struct RunContext {
  RunConfig config;
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  std::ostream* log = nullptr;  // human-readable summary, may be null
};

struct RunSummary {
  std::string command;
  nlohmann::ordered_json resolved;
  nlohmann::ordered_json derived;
  nlohmann::ordered_json headline;
  double wall_clock_s = 0.0;
  int exit_code = kExitOk;

  nlohmann::ordered_json to_json() const;
};

RunSummary cmd_spectrum(const RunContext& ctx);
RunSummary cmd_window(const RunContext& ctx);
RunSummary cmd_vg(const RunContext& ctx);
RunSummary cmd_validate(const RunContext& ctx);
RunSummary cmd_evolve(const RunContext& ctx);
RunSummary cmd_params(const RunContext& ctx);

/// Runs `command` by name, writes `summary.json` next to its outputs and
/// maps errors to exit codes (messages go to `err`).
int run_command(const std::string& command, const RunContext& ctx, std::ostream& err);

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace eit::cli
