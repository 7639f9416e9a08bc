#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "effbench/codegen.hpp"
#include "effbench/metrics.hpp"
#include "effbench/problem_store.hpp"
#include "effbench/report.hpp"
#include "effbench/toolchain_config.hpp"

namespace effbench {

/// What counts as a correct sample.
enum class CorrectnessMode {
  SimAndSynth,  // testbench Pass and synthesis Ok
  SimOnly,      // testbench Pass
};

std::string_view to_string(CorrectnessMode m);  // "sim+synth" / "sim-only"
CorrectnessMode parse_correctness_mode(std::string_view s);

enum class ClientKind { Http, MockReferences, MockBaseline, MockMixed };

std::string_view to_string(ClientKind k);  // "http", "mock-references", ...
ClientKind parse_client_kind(std::string_view s);

struct RunConfig {
  std::filesystem::path suite;
  std::filesystem::path toolchains;
  Formulation formulation = Formulation::P1RewriteUnoptimized;
  GenerationConfig gen;  // gen.target_metric is replaced per target
  std::vector<MetricKind> targets{MetricKind::Area, MetricKind::Delay, MetricKind::Power};
  std::string backend = "mock";
  std::string strategy = "balanced";
  std::string simulator = "mock";
  std::vector<int> ks{1, 5, 10};
  CorrectnessMode correctness = CorrectnessMode::SimAndSynth;
  bool clamp = true;
  ClientKind client = ClientKind::Http;
  std::size_t workers = 1;
  bool keep_artifacts = false;
  std::filesystem::path scratch_parent;
  /// Mock simulator executable; default_mocksim_path() when empty.
  std::filesystem::path mocksim;

  /// Throws Error(InvalidConfig): n < max(ks), empty targets, bad generation settings.
  void validate() const;
  /// Settings that determine the persisted records. Scoring-only settings
  /// (ks, correctness, clamp) and execution settings are left out.
  nlohmann::json identity(const Suite& suite) const;
  /// Identity plus scoring settings, as shown in reports.
  nlohmann::json snapshot(const Suite& suite) const;
};

/// 16 hex digits over the canonical JSON dump.
std::string config_hash(const nlohmann::json& identity);

/// $EFFBENCH_MOCKSIM, else `effbench-mocksim` next to the running executable.
std::filesystem::path default_mocksim_path();

/// Rescoring knobs; unset fields keep the values stored with the run.
struct ScoreOptions {
  std::optional<std::vector<int>> ks;
  std::optional<CorrectnessMode> correctness;
  std::optional<bool> clamp;
  std::optional<ThresholdPolicy> policy;
  /// Explicit upper bounds T per problem, replacing the stored ones.
  std::optional<std::map<std::string, MetricVector>> thresholds;
};

using Progress = std::function<void(const std::string&)>;

/// Full flow into `run_dir`: reference synthesis, generation, simulation,
/// synthesis, scoring, report files. Resumes from records.jsonl when run.json
/// holds the same config hash; throws Error(ConfigMismatch) otherwise.
/// `client` overrides the configured model client (tests).
RunReport cmd_run(const RunConfig& cfg, const std::filesystem::path& run_dir,
                  ChatClient* client = nullptr, const Progress& progress = {});

/// Builds the score table from run.json and records.jsonl alone.
/// Throws Error(IncompleteRun) listing missing record keys.
ScoreTable build_score_table(const std::filesystem::path& run_dir, const ScoreOptions& opts = {});

/// Replays scoring from persisted records; never invokes tools.
SuiteScores cmd_score(const std::filesystem::path& run_dir, const ScoreOptions& opts = {});

/// Rescores and rewrites the report files of `run_dir`.
RunReport cmd_report(const std::filesystem::path& run_dir, const ScoreOptions& opts = {});

struct AuditRow {
  std::string problem_id;
  std::string check;   // sim/<role>, synth/<role>, direction/<metric>, bundle
  std::string status;  // pass, fail, degenerate, n/a
  std::string detail;

  bool hard_failure() const { return status == "fail" || status == "degenerate"; }
};

struct AuditResult {
  std::vector<AuditRow> rows;
  DistributionData distributions;

  bool ok() const;
};

struct VerifyOptions {
  std::string backend = "mock";
  std::string strategy = "balanced";
  std::string simulator = "mock";
  std::filesystem::path mocksim;
  std::size_t workers = 1;
  std::filesystem::path scratch_parent;
  bool keep_artifacts = false;
};

/// Audits every bundle of a suite: references simulate Pass against the
/// baseline, all four designs synthesize, each reference beats the baseline in
/// its own metric. Writes audit.md, audit.csv and distributions.csv to `out_dir`.
AuditResult cmd_verify_refs(const Suite& suite, const Toolchains& tc, const VerifyOptions& opts,
                            const std::filesystem::path& out_dir);

}  // namespace effbench
