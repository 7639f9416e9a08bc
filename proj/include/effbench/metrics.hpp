#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effbench/types.hpp"

namespace effbench {

/// Efficiency of one sample against upper bound `T` and reference `R`:
/// max(0, T - measured) / (T - R), optionally capped at 1; 0 when incorrect.
/// Throws Error(DegenerateThreshold) when T <= R.
double efficiency_score(double measured, double T, double R, bool correct, bool clamp = true);

/// 1 - C(n-c, k) / C(n, k). Throws Error(InvalidK) unless 1 <= k <= n, and
/// Error(InvalidTable) unless 0 <= c <= n.
double pass_at_k(int n, int c, int k);

/// Expected maximum of a uniformly drawn size-k subset of `e`.
double eff_at_k(std::vector<double> e, int k);

/// Suite mean of eff_at_k over per-problem lists. Throws EmptySuite / InvalidK.
double eff_at_k(const std::vector<std::vector<double>>& e_lists, int k);

/// How a metric column of a score row is populated.
enum class CellState {
  NotRequested,  // the row's generation run did not target this metric
  Degenerate,    // T <= R for this problem: excluded from eff@k
  Scored,
};

std::string_view to_string(CellState s);

/// One evaluation unit: the n samples drawn for a problem under one target metric.
struct ScoreRow {
  std::string problem_id;
  Difficulty difficulty = Difficulty::Easy;
  MetricKind target = MetricKind::Area;
  std::vector<bool> correct;
  std::array<CellState, 3> state{CellState::NotRequested, CellState::NotRequested,
                                 CellState::NotRequested};
  std::array<std::vector<double>, 3> e;  // length n when state is Scored
  /// Free-form outcome histogram ("pass", "mismatch", ...); carried into reports.
  std::map<std::string, int> outcomes;

  int n() const { return static_cast<int>(correct.size()); }
  int c() const;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;

  /// Throws Error(InvalidTable) when a row breaks the table invariants.
  void validate() const;
};

/// pass@k and eff@k over a set of rows, indexed like `ks`.
struct ScoreLine {
  std::size_t units = 0;
  std::vector<double> pass;
  /// eff[m][i]; nullopt when no row has metric m scored.
  std::array<std::vector<std::optional<double>>, 3> eff;

  bool operator==(const ScoreLine&) const = default;
};

struct RowScores {
  std::string problem_id;
  Difficulty difficulty = Difficulty::Easy;
  MetricKind target = MetricKind::Area;
  int n = 0;
  int c = 0;
  std::array<CellState, 3> state{};
  std::vector<double> pass;
  std::array<std::vector<std::optional<double>>, 3> eff;
  std::array<std::optional<double>, 3> best_e;
  std::map<std::string, int> outcomes;

  bool operator==(const RowScores&) const = default;
};

struct SuiteScores {
  std::vector<int> ks;
  ScoreLine overall;
  std::map<Difficulty, ScoreLine> by_difficulty;
  std::vector<RowScores> rows;

  bool operator==(const SuiteScores&) const = default;
};

/// Scores every k in `ks` (each must lie in [1, min n]). Rows are reported in
/// (problem id, target) order regardless of input order.
SuiteScores score_suite(const ScoreTable& table, const std::vector<int>& ks);

}  // namespace effbench
