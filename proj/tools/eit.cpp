#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eit/cli/commands.hpp"
#include "eit/cli/config.hpp"

int main(int argc, char** argv) {
  using namespace eit::cli;

  CLI::App app{"Six-level Pr:YSO EIT simulator"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<std::string> backend;
  std::size_t jobs = 1;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", overrides, "Override one key, path=value (repeatable)")->allow_extra_args(false);
  app.add_option("--out", out_dir, "Output directory (default: output.dir)");
  app.add_option("--backend", backend, "analytic | full")->check(CLI::IsMember({"analytic", "full"}));
  app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "Susceptibility, index and absorption over the detuning grid"},
      {"window", "Transparency window width"},
      {"vg", "Group velocity at the probe detuning"},
      {"validate", "Compare the six-level model with the closed-form Lambda result"},
      {"evolve", "Time evolution of the density matrix"},
      {"params", "Resolved material parameters"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  RunContext ctx;
  try {
    ctx.config = load_config(config_path, overrides);
    if (backend) apply_override(ctx.config, "backend=" + *backend);
    if (out_dir) ctx.config.output_dir = *out_dir;
  } catch (const eit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  ctx.out_dir = ctx.config.output_dir;
  ctx.jobs = jobs;
  ctx.log = &std::cout;
  return run_command(app.get_subcommands().front()->get_name(), ctx, std::cerr);
}
