#include "effbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "effbench/error.hpp"

namespace effbench {

double efficiency_score(double measured, double T, double R, bool correct, bool clamp) {
  if (!(T > R)) {
    throw Error(ErrorKind::DegenerateThreshold,
                "threshold T=" + std::to_string(T) + " does not exceed reference R=" +
                    std::to_string(R));
  }
  if (!correct) return 0.0;
  const double e = std::max(0.0, T - measured) / (T - R);
  return clamp ? std::min(1.0, e) : e;
}

double pass_at_k(int n, int c, int k) {
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidK,
                "k=" + std::to_string(k) + " outside [1, n=" + std::to_string(n) + "]");
  }
  if (c < 0 || c > n) {
    throw Error(ErrorKind::InvalidTable,
                "c=" + std::to_string(c) + " outside [0, n=" + std::to_string(n) + "]");
  }
  if (n - c < k) return 1.0;
  // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k/i)
  double ratio = 1.0;
  for (int i = n - c + 1; i <= n; ++i) ratio *= 1.0 - static_cast<double>(k) / i;
  return 1.0 - ratio;
}

double eff_at_k(std::vector<double> e, int k) {
  const int n = static_cast<int>(e.size());
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidK,
                "k=" + std::to_string(k) + " outside [1, n=" + std::to_string(n) + "]");
  }
  std::sort(e.begin(), e.end());
  // Weight of the r-th smallest value (1-based) is C(r-1, k-1) / C(n, k): the
  // probability that it is the maximum of the drawn subset. Start at r = n,
  // where the weight is k/n, and step down.
  double w = static_cast<double>(k) / n;
  double sum = 0.0;
  for (int r = n; r >= k; --r) {
    sum += w * e[r - 1];
    if (r > 1) w *= static_cast<double>(r - k) / (r - 1);
  }
  return sum;
}

double eff_at_k(const std::vector<std::vector<double>>& e_lists, int k) {
  if (e_lists.empty()) throw Error(ErrorKind::EmptySuite, "no problems to score");
  double total = 0.0;
  for (const auto& e : e_lists) total += eff_at_k(e, k);
  return total / static_cast<double>(e_lists.size());
}

std::string_view to_string(CellState s) {
  switch (s) {
    case CellState::NotRequested: return "not_requested";
    case CellState::Degenerate: return "degenerate";
    case CellState::Scored: return "scored";
  }
  return "?";
}

int ScoreRow::c() const {
  return static_cast<int>(std::count(correct.begin(), correct.end(), true));
}

void ScoreTable::validate() const {
  for (const auto& row : rows) {
    const auto where = row.problem_id + "/" + std::string(to_string(row.target));
    if (row.correct.empty()) {
      throw Error(ErrorKind::InvalidTable, where + ": no samples", row.problem_id);
    }
    for (auto m : kAllMetrics) {
      if (row.state[index_of(m)] != CellState::Scored) continue;
      const auto& e = row.e[index_of(m)];
      if (e.size() != row.correct.size()) {
        throw Error(ErrorKind::InvalidTable,
                    where + ": " + std::string(to_string(m)) + " has " + std::to_string(e.size()) +
                        " scores for " + std::to_string(row.correct.size()) + " samples",
                    row.problem_id);
      }
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (!std::isfinite(e[j]) || e[j] < 0.0) {
          throw Error(ErrorKind::InvalidTable, where + ": non-finite or negative score",
                      row.problem_id);
        }
        if (!row.correct[j] && e[j] != 0.0) {
          throw Error(ErrorKind::InvalidTable,
                      where + ": incorrect sample " + std::to_string(j) + " has nonzero score",
                      row.problem_id);
        }
      }
    }
  }
}

namespace {

ScoreLine score_rows(const std::vector<const ScoreRow*>& rows, const std::vector<int>& ks) {
  ScoreLine line;
  line.units = rows.size();
  for (int k : ks) {
    double p = 0.0;
    for (const auto* r : rows) p += pass_at_k(r->n(), r->c(), k);
    line.pass.push_back(rows.empty() ? 0.0 : p / static_cast<double>(rows.size()));
    for (auto m : kAllMetrics) {
      std::vector<std::vector<double>> lists;
      for (const auto* r : rows) {
        if (r->state[index_of(m)] == CellState::Scored) lists.push_back(r->e[index_of(m)]);
      }
      line.eff[index_of(m)].push_back(lists.empty() ? std::nullopt
                                                    : std::optional<double>(eff_at_k(lists, k)));
    }
  }
  return line;
}

}  // namespace

SuiteScores score_suite(const ScoreTable& table, const std::vector<int>& ks) {
  if (table.rows.empty()) throw Error(ErrorKind::EmptySuite, "score table has no rows");
  table.validate();
  if (ks.empty()) throw Error(ErrorKind::InvalidK, "no k values requested");
  int min_n = table.rows.front().n();
  for (const auto& r : table.rows) min_n = std::min(min_n, r.n());
  for (int k : ks) {
    if (k < 1 || k > min_n) {
      throw Error(ErrorKind::InvalidK,
                  "k=" + std::to_string(k) + " outside [1, min n=" + std::to_string(min_n) + "]");
    }
  }

  std::vector<const ScoreRow*> rows;
  for (const auto& r : table.rows) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const ScoreRow* a, const ScoreRow* b) {
    return std::tie(a->problem_id, a->target) < std::tie(b->problem_id, b->target);
  });

  SuiteScores out;
  out.ks = ks;
  out.overall = score_rows(rows, ks);

  std::map<Difficulty, std::vector<const ScoreRow*>> groups;
  for (const auto* r : rows) groups[r->difficulty].push_back(r);
  for (const auto& [d, g] : groups) out.by_difficulty[d] = score_rows(g, ks);

  for (const auto* r : rows) {
    RowScores rs;
    rs.problem_id = r->problem_id;
    rs.difficulty = r->difficulty;
    rs.target = r->target;
    rs.n = r->n();
    rs.c = r->c();
    rs.state = r->state;
    rs.outcomes = r->outcomes;
    const auto one = score_rows({r}, ks);
    rs.pass = one.pass;
    rs.eff = one.eff;
    for (auto m : kAllMetrics) {
      const auto& e = r->e[index_of(m)];
      if (r->state[index_of(m)] == CellState::Scored && !e.empty()) {
        rs.best_e[index_of(m)] = *std::max_element(e.begin(), e.end());
      }
    }
    out.rows.push_back(std::move(rs));
  }
  return out;
}

}  // namespace effbench
