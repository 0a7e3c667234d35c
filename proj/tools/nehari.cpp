#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nehari/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nehari-manifold ground states for quasilinear, Kirchhoff and anisotropic problems"};
  app.require_subcommand(1);

  std::string config;
  nehari::CliFlags flags;
  std::uint64_t seed = 0;
  std::string out;

  for (const char* name : {"solve", "check", "fiber", "oracle"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file")->required();
    sub->add_flag("--force", flags.force, "solve even when a hypothesis check fails");
    sub->add_option("--seed", seed, "overrides solver.seed and fiber.seed");
    sub->add_option("--out", out, "overrides output.directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nehari::kExitConfig;
  }

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) flags.seed = seed;
  if (sub->count("--out")) flags.out = out;
  return nehari::run_command(sub->get_name(), config, flags, std::cout, std::cerr);
}
