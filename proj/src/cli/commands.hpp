#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace varspace::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2 };

struct RunOptions {
  std::string config_path;
  std::string out_dir;               ///< overrides output_dir from the config
  std::optional<std::uint64_t> seed;  ///< overrides seed from the config
  bool quiet = false;
};

/// Subcommand names, in help order.
const std::vector<std::string>& command_names();

/// Runs one experiment end to end: parse and validate the config, compute,
/// write outputs, then write manifest.json last. Never throws.
int run_command(const std::string& name, const RunOptions& options);

}  // namespace varspace::cli
