#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "effbench/types.hpp"

namespace effbench {

enum class ObjectiveHint { Area, Delay, Balanced };

std::string_view to_string(ObjectiveHint h);
ObjectiveHint parse_objective_hint(std::string_view s);

/// A named logic-optimization command sequence (ABC commands for the yosys flow).
struct StrategyScript {
  std::string name;
  std::vector<std::string> commands;
  ObjectiveHint hint = ObjectiveHint::Balanced;

  bool operator==(const StrategyScript&) const = default;
};

/// Where and how one metric is read from a tool report.
struct ReportParser {
  std::string report_file;  // relative to the report directory
  std::string pattern;      // ECMAScript regex
  int group = 1;
  double scale = 1.0;
};

enum class BackendKind { External, Mock };

/// Settings of the built-in deterministic backend.
struct MockSettings {
  std::string key = "mock";                  // mixed into the hash
  std::array<double, 3> scale{1.0, 1.0, 1.0};  // per metric
  std::map<std::string, MetricVector> overrides;  // design fingerprint -> metrics
};

struct SynthBackend {
  std::string name;
  BackendKind kind = BackendKind::Mock;
  std::string liberty;  // environment references already expanded
  std::vector<StrategyScript> strategies;
  /// Files written into the report directory before the commands run
  /// (name -> template).
  std::map<std::string, std::string> script_files;
  /// Shell command templates, run in order inside the report directory.
  std::vector<std::string> commands;
  /// One parser per metric; a missing entry means the backend cannot produce it.
  std::array<std::optional<ReportParser>, 3> parsers;
  /// Regexes over the tool log that mark the design, not the tool, as at fault.
  std::vector<std::string> unsynthesizable_patterns;
  std::chrono::duration<double> timeout{900};
  double clock_period = 10.0;
  std::string power_assumptions;
  MockSettings mock;

  bool supports(MetricKind m) const { return parsers[index_of(m)].has_value(); }
  const StrategyScript* strategy(std::string_view name) const;
};

enum class SynthStatus { Ok, NotSynthesizable, ToolError };

std::string_view to_string(SynthStatus s);
SynthStatus parse_synth_status(std::string_view s);

struct SynthOutcome {
  SynthStatus status = SynthStatus::ToolError;
  MetricVector metrics;  // populated only when Ok
  std::optional<std::filesystem::path> netlist_path;
  std::string log;
};

struct SynthOptions {
  std::string top;                         // module to synthesize
  std::vector<std::string> header_ports;   // used to fingerprint the design
  std::filesystem::path scratch_parent;    // system temp dir when empty
  bool keep_artifacts = false;
};

/// Synthesizes `src` with `strategy`. Throws Error(ToolNotFound) when a tool
/// command is missing from PATH.
SynthOutcome synthesize(std::string_view src, const SynthBackend& backend,
                        const StrategyScript& strategy, const SynthOptions& opts);

/// Renames the module matching `opts.header_ports` to `opts.top`, then
/// synthesizes. A source without any module is NotSynthesizable.
SynthOutcome synthesize_renamed(std::string_view src, const SynthBackend& backend,
                                const StrategyScript& strategy, const SynthOptions& opts);

/// First match of `spec.pattern` in `report`, capture group `spec.group`, times
/// `spec.scale`. Locale-independent. Throws Error(MetricNotFound).
double extract_metric(std::string_view report, const ReportParser& spec);

/// The backend's strategies in configuration order.
std::vector<StrategyScript> list_strategies(const SynthBackend& backend);

/// The built-in deterministic backend with its report parsers and a single
/// Balanced strategy.
SynthBackend make_mock_backend(std::string name = "mock", std::string key = "mock");

/// Report text the mock backend writes for `metric`; parsed back with the mock
/// parsers it reproduces `value` exactly.
std::string render_mock_report(MetricKind metric, double value);

/// Metrics the mock backend assigns to a design before report rendering.
MetricVector mock_metrics(std::string_view src, const SynthBackend& backend,
                          const StrategyScript& strategy,
                          const std::vector<std::string>& header_ports);

}  // namespace effbench
