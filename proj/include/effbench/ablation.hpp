#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "effbench/problem_store.hpp"
#include "effbench/record_log.hpp"
#include "effbench/report.hpp"
#include "effbench/synth_harness.hpp"
#include "effbench/toolchain_config.hpp"

namespace effbench {

struct SweepPlan {
  std::vector<SynthBackend> backends;
  std::vector<ProblemBundle> problems;
  std::vector<DesignRole> designs;
  /// Strategy names to run; empty means every strategy each backend declares.
  std::vector<std::string> strategies;

  /// Strategies actually swept on `b`. Throws Error(InvalidConfig) when none remain.
  std::vector<StrategyScript> strategies_for(const SynthBackend& b) const;
  /// Number of cells; throws Error(InvalidConfig) when the cross-product is empty.
  std::size_t total_jobs() const;
};

/// Plan file: suite (path), problems (ids, empty = all), backends (names),
/// designs (roles), strategies (names, empty = all).
SweepPlan load_sweep_plan(const std::filesystem::path& file, const Toolchains& tc);

struct SweepRecord {
  std::string backend;
  std::string problem_id;
  DesignRole design = DesignRole::Unopt;
  std::string strategy;
  SynthStatus status = SynthStatus::ToolError;
  MetricVector metrics;
  std::string error;
  /// Efficiency against the same backend/strategy baseline; nullopt when the
  /// metric, the baseline or the reference is unavailable, or T <= R.
  std::array<std::optional<double>, 3> e;

  /// backend/problem/design/strategy
  std::string key() const;
  nlohmann::json to_json() const;  // `e` is derived and not stored
  static SweepRecord from_json(const nlohmann::json& j);

  bool operator==(const SweepRecord&) const = default;
};

std::string sweep_key(const std::string& backend, const std::string& problem, DesignRole design,
                      const std::string& strategy);

struct SweepOptions {
  std::filesystem::path scratch_parent;
  bool keep_artifacts = false;
  std::size_t workers = 1;
  /// Called once with the job count before any cell runs.
  std::function<void(std::size_t total, std::size_t already_done)> on_plan;
};

struct SweepResult {
  std::size_t total_jobs = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::vector<SweepRecord> records;  // key order, with derived e filled in
};

/// Synthesizes every cell not yet present in `log`. Failed cells are recorded
/// and the sweep continues; throws Error(AllCellsFailed) when no cell is Ok.
/// Missing tools propagate as Error(ToolNotFound).
SweepResult run_sweep(const SweepPlan& plan, RecordLog& log, const SweepOptions& opts);

/// Fills SweepRecord::e. T is the group's (backend, problem, strategy) baseline,
/// R the group's reference for the metric, or the best swept design when that
/// reference is not part of the sweep.
void derive_efficiency(std::vector<SweepRecord>& records);

/// e per backend, problem and metric; nullopt where unavailable.
using BackendEfficiency = std::map<std::string, std::map<std::string, std::array<std::optional<double>, 3>>>;

/// For every backend and problem, the e of the metric's reference design under
/// `strategy`, or under the backend's first strategy (by name) lacking that one.
BackendEfficiency reference_efficiency(const std::vector<SweepRecord>& records,
                                       const std::string& strategy = "balanced");

struct ConsistencyRow {
  std::string problem_id;
  MetricKind metric = MetricKind::Area;
  std::map<std::string, double> e;  // backend -> e
  double spread = 0.0;              // max pairwise |delta e|
  bool sign_agreement = true;       // all improve (e > 0) or none does
};

/// One row per (problem, metric) with values from at least two backends.
/// Throws Error(InsufficientBackends) when no such pair exists.
std::vector<ConsistencyRow> consistency_score(const BackendEfficiency& by_backend);

std::string emit_sweep_csv(const std::vector<SweepRecord>& records);
std::string emit_consistency_csv(const std::vector<ConsistencyRow>& rows);
/// Area/delay points across strategies, one group per backend/problem/design.
std::vector<ParetoPoint> sweep_pareto(const std::vector<SweepRecord>& records);

/// Writes sweep.csv, pareto.csv and, with two or more backends, consistency.csv.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace effbench
