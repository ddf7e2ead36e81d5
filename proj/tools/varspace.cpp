#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace varspace::cli;
  CLI::App app{"Variation-norm experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", VARSPACE_VERSION);

  RunOptions opt;
  std::uint64_t seed = 0;
  std::string chosen;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opt.config_path, "JSON config file")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kSuccess : kConfigError;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }
  return run_command(chosen, opt);
}
