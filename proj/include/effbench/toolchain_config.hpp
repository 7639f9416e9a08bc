#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "effbench/sim_harness.hpp"
#include "effbench/synth_harness.hpp"

namespace effbench {

struct SimulatorProfile {
  std::string name;
  std::string compile_cmd;
  std::string run_cmd;
  double timeout_s = 120.0;

  /// SimConfig for this profile; `vars` supplies extra placeholders such as {mocksim}.
  SimConfig to_sim_config(const std::map<std::string, std::string>& vars) const;
};

struct Toolchains {
  std::map<std::string, SimulatorProfile> simulators;
  std::map<std::string, StrategyScript> strategies;
  std::map<std::string, SynthBackend> backends;

  /// Throw Error(InvalidConfig) naming the available entries when absent.
  const SimulatorProfile& simulator(const std::string& name) const;
  const SynthBackend& backend(const std::string& name) const;
};

/// Reads the YAML toolchain file. Relative paths inside it (mock override files)
/// resolve against the file's directory.
Toolchains load_toolchains(const std::filesystem::path& file);

/// Reads a fingerprint -> {area, delay, power} YAML map.
std::map<std::string, MetricVector> load_metric_overrides(const std::filesystem::path& file);

}  // namespace effbench
