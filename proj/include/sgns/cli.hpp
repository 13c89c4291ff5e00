#pragma once

// Command-line front end:
//
//   sgns solve        --config run.json  [--out DIR] [--seed N]
//   sgns converge     --config study.json [--out DIR] [--seed N] [--threads T]
//   sgns perturb      --config lab.json  [--out DIR] [--seed N] [--threads T]
//   sgns check-lemmas [--out DIR] [--seed N]
//
// The output directory is --out when given, otherwise output.directory from
// the config placed under $SGNS_OUTPUT_ROOT when that variable is set.

#include "sgns/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace sgns {

inline constexpr const char* kOutputRootVariable = "SGNS_OUTPUT_ROOT";

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitConfigError = 2 };

struct RunManifest {
  std::string command;  // solve | converge | perturb | check-lemmas
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> output_directory;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

/// --out, else $SGNS_OUTPUT_ROOT / output.directory, else output.directory.
std::filesystem::path resolve_output_directory(const RunManifest& manifest, const RunConfig& config);

/// Executes one command. Progress goes to `log`, problems to `err`.
int run(const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// Parses argv into a manifest and runs it.
int run_command_line(int argc, char** argv);

}  // namespace sgns
