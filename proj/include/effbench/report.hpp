#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "effbench/metrics.hpp"
#include "effbench/types.hpp"

namespace effbench {

enum class TableFormat { Markdown, Csv, Json };

/// Fixed three-decimal rendering used by every export; "n/a" for absent values.
std::string fmt3(std::optional<double> v);

/// Suite score table: one row of pass@k per k, then eff@k per k and metric.
/// Throws Error(EmptySuite) when `scores` holds no rows.
std::string emit_score_table(const SuiteScores& scores, TableFormat format);

/// Same columns, one row per difficulty present.
std::string emit_difficulty_table(const SuiteScores& scores, TableFormat format);

struct QuadrantPoint {
  std::string problem_id;
  MetricKind metric = MetricKind::Area;
  double pass = 0.0;
  double eff = 0.0;
  std::string quadrant;
};

/// Label for a (pass, eff) point; both splits are strict (value > split).
std::string quadrant_label(double pass, double eff, double pass_split, double eff_split);

/// One point per (problem, metric) from the rows targeting that metric, at the
/// k of `scores.ks` equal to `k`. Degenerate rows are skipped.
std::vector<QuadrantPoint> quadrant_points(const SuiteScores& scores, int k,
                                           double pass_split = 0.5, double eff_split = 0.5);
std::string emit_quadrant_csv(const std::vector<QuadrantPoint>& points);

struct ParetoPoint {
  std::string group;  // e.g. "mock/p017_trailing_zeros/unopt"; empty for a single set
  std::string strategy;
  double area = 0.0;
  double delay = 0.0;
  bool non_dominated = true;
};

/// Flags points no other point of the same group dominates (<= in both
/// metrics and < in at least one). Points missing area or delay are dropped.
std::vector<ParetoPoint> pareto_front(const std::vector<std::pair<std::string, MetricVector>>& sweep,
                                      const std::string& group = {});
std::string emit_pareto_csv(const std::vector<ParetoPoint>& points);

struct DistributionRow {
  std::string problem_id;
  MetricKind metric = MetricKind::Area;
  double before = 0.0;
  double after = 0.0;
  double reduction_pct = 0.0;
};

struct DistributionData {
  std::vector<DistributionRow> rows;
  std::array<std::optional<double>, 3> mean_reduction_pct;
};

/// Pairs `before` and `after` by problem id. Throws Error(UnpairedProblem) for an
/// id present on one side only. Metrics missing on either side are skipped.
DistributionData distribution_data(const std::map<std::string, MetricVector>& before,
                                   const std::map<std::string, MetricVector>& after);
std::string emit_distribution_csv(const DistributionData& d);

struct RunReport {
  std::string run_id;
  nlohmann::json config;  // snapshot: backend, strategy, policy, generation settings
  std::string correctness;  // "sim+synth" or "sim-only"
  SuiteScores scores;
  std::string started_at;
  std::string finished_at;

  bool operator==(const RunReport&) const = default;
};

nlohmann::json to_json(const RunReport& r);
RunReport run_report_from_json(const nlohmann::json& j);

/// Writes report.md, scores.csv, scores.json, quadrant.csv and report.json into
/// `dir` (quadrant data at the smallest k), plus pareto.csv and
/// distributions.csv when given.
void write_run_report(const RunReport& r, const std::filesystem::path& dir,
                      const std::vector<ParetoPoint>* pareto = nullptr,
                      const DistributionData* distributions = nullptr);

}  // namespace effbench
