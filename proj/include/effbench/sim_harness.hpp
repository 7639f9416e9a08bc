#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "effbench/problem_store.hpp"

namespace effbench {

enum class SimStatus { Pass, Mismatch, Timeout, CompileError, RuntimeError };

std::string_view to_string(SimStatus s);
SimStatus parse_sim_status(std::string_view s);

/// Prepended to the transcript when the compile step fails.
inline constexpr std::string_view kCompileFailedMarker = "[effbench] compile failed";

struct SimVerdict {
  SimStatus status = SimStatus::RuntimeError;
  std::uint64_t mismatches = 0;  // meaningful for Mismatch
  std::string transcript;
  std::chrono::duration<double> duration{};
  std::filesystem::path artifacts_dir;  // set only when artifacts are kept
};

struct ParsedVerdict {
  SimStatus status = SimStatus::RuntimeError;
  std::uint64_t mismatches = 0;

  bool operator==(const ParsedVerdict&) const = default;
};

/// Classifies a transcript by its marker tokens only. Precedence:
/// compile-failure marker, then "TIMEOUT", then the first "Total mismatches: N".
/// N == 0 is Pass only together with "Simulation completed."; with no marker at
/// all the result is RuntimeError. Total over arbitrary text.
ParsedVerdict parse_verdict(std::string_view transcript);

struct SimConfig {
  /// Placeholders: {sources}, {out} / {exe}. Extra variables (e.g. {mocksim})
  /// come from `vars`.
  std::string compile_cmd;
  std::string run_cmd;
  std::map<std::string, std::string> vars;
  std::chrono::duration<double> wall_timeout{120};
  std::filesystem::path scratch_parent;  // system temp dir when empty
  bool keep_artifacts = false;
};

struct SimSource {
  std::string filename;
  std::string text;
};

/// Candidate renamed to `opt_model`, baseline renamed to `unopt_model`, testbench
/// as-is. Throws Error(RenameFailure) when either design holds no module.
std::vector<SimSource> compose_sim_unit(std::string_view candidate, const ProblemBundle& b);

/// Compiles and runs `files` in a fresh scratch directory. Throws
/// Error(SimulatorNotFound) when the shell cannot find the simulator.
SimVerdict run_simulation(const std::vector<SimSource>& files, const SimConfig& cfg);

}  // namespace effbench
