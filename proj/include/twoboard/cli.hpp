#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twoboard/config.hpp"

namespace twoboard {

/// One pass/fail line of a run manifest.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct RunOptions {
  std::string out_dir;                  // empty: config output directory
  std::optional<std::uint64_t> seed;   // overrides the configured seed
  int threads = 1;
  std::vector<std::string> suites;      // verify only; empty: config suites
  std::string config_text;              // raw text, hashed into the manifest
};

struct RunResult {
  std::vector<Check> checks;
  std::string out_dir;
  bool passed() const;
};

/// Runs one subcommand (solve, simulate, converge, verify, n-system) and
/// writes its artifacts plus manifest.json into the output directory.
RunResult run_command(const std::string& command, const ExperimentConfig& config, const RunOptions& options);

/// Entry point of the command-line tool. Exit status 0 iff every check passed;
/// 1 when a check failed, 2 for usage or configuration errors, 3 for runtime
/// failures.
int run_cli(int argc, char** argv);

}  // namespace twoboard
