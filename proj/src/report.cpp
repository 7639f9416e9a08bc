#include "effbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "effbench/error.hpp"
#include "effbench/process.hpp"

namespace effbench {

using nlohmann::json;

std::string fmt3(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

namespace {

json round3(std::optional<double> v) {
  if (!v) return nullptr;
  return std::round(*v * 1000.0) / 1000.0;
}

std::vector<std::string> score_columns(const std::vector<int>& ks) {
  std::vector<std::string> cols;
  for (int k : ks) cols.push_back("pass@" + std::to_string(k));
  for (int k : ks) {
    for (auto m : kAllMetrics) cols.push_back("eff@" + std::to_string(k) + " " + std::string(to_string(m)));
  }
  return cols;
}

std::vector<std::optional<double>> score_cells(const ScoreLine& line) {
  std::vector<std::optional<double>> cells(line.pass.begin(), line.pass.end());
  for (std::size_t i = 0; i < line.pass.size(); ++i) {
    for (auto m : kAllMetrics) cells.push_back(line.eff[index_of(m)][i]);
  }
  return cells;
}

std::string csv_name(std::string s) {
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

std::string emit_lines(const std::vector<int>& ks,
                       const std::vector<std::pair<std::string, const ScoreLine*>>& lines,
                       TableFormat format) {
  const auto cols = score_columns(ks);
  std::ostringstream os;
  switch (format) {
    case TableFormat::Markdown: {
      os << "| scope | units |";
      for (const auto& c : cols) os << ' ' << c << " |";
      os << "\n|---|---:|";
      for (std::size_t i = 0; i < cols.size(); ++i) os << "---:|";
      os << '\n';
      for (const auto& [scope, line] : lines) {
        os << "| " << scope << " | " << line->units << " |";
        for (const auto& v : score_cells(*line)) os << ' ' << fmt3(v) << " |";
        os << '\n';
      }
      break;
    }
    case TableFormat::Csv: {
      os << "scope,units";
      for (const auto& c : cols) os << ',' << csv_name(c);
      os << '\n';
      for (const auto& [scope, line] : lines) {
        os << scope << ',' << line->units;
        for (const auto& v : score_cells(*line)) os << ',' << fmt3(v);
        os << '\n';
      }
      break;
    }
    case TableFormat::Json: {
      json arr = json::array();
      for (const auto& [scope, line] : lines) {
        json row = {{"scope", scope}, {"units", line->units}};
        const auto cells = score_cells(*line);
        for (std::size_t i = 0; i < cols.size(); ++i) row[csv_name(cols[i])] = round3(cells[i]);
        arr.push_back(row);
      }
      os << json{{"ks", ks}, {"rows", arr}}.dump(2) << '\n';
      break;
    }
  }
  return os.str();
}

std::string outcomes_text(const std::map<std::string, int>& o) {
  std::string s;
  for (const auto& [k, v] : o) s += (s.empty() ? "" : " ") + k + "=" + std::to_string(v);
  return s.empty() ? "-" : s;
}

}  // namespace

std::string emit_score_table(const SuiteScores& scores, TableFormat format) {
  if (scores.rows.empty()) throw Error(ErrorKind::EmptySuite, "no scores to tabulate");
  return emit_lines(scores.ks, {{"all", &scores.overall}}, format);
}

std::string emit_difficulty_table(const SuiteScores& scores, TableFormat format) {
  if (scores.rows.empty()) throw Error(ErrorKind::EmptySuite, "no scores to tabulate");
  std::vector<std::pair<std::string, const ScoreLine*>> lines;
  for (const auto& [d, line] : scores.by_difficulty) lines.emplace_back(std::string(to_string(d)), &line);
  return emit_lines(scores.ks, lines, format);
}

std::string quadrant_label(double pass, double eff, double pass_split, double eff_split) {
  const bool correct = pass > pass_split;
  const bool efficient = eff > eff_split;
  if (correct && efficient) return "correct-and-efficient";
  if (correct) return "correct-but-inefficient";
  if (efficient) return "incorrect-but-efficient";
  return "incorrect-and-inefficient";
}

std::vector<QuadrantPoint> quadrant_points(const SuiteScores& scores, int k, double pass_split,
                                           double eff_split) {
  const auto it = std::find(scores.ks.begin(), scores.ks.end(), k);
  if (it == scores.ks.end()) {
    throw Error(ErrorKind::InvalidK, "k=" + std::to_string(k) + " was not scored");
  }
  const auto ki = static_cast<std::size_t>(it - scores.ks.begin());
  std::vector<QuadrantPoint> out;
  for (const auto& r : scores.rows) {
    const auto& e = r.eff[index_of(r.target)][ki];
    if (!e) continue;
    out.push_back({r.problem_id, r.target, r.pass[ki], *e,
                   quadrant_label(r.pass[ki], *e, pass_split, eff_split)});
  }
  return out;
}

std::string emit_quadrant_csv(const std::vector<QuadrantPoint>& points) {
  std::ostringstream os;
  os << "problem,metric,pass,eff,quadrant\n";
  for (const auto& p : points) {
    os << p.problem_id << ',' << to_string(p.metric) << ',' << fmt3(p.pass) << ','
       << fmt3(p.eff) << ',' << p.quadrant << '\n';
  }
  return os.str();
}

std::vector<ParetoPoint> pareto_front(const std::vector<std::pair<std::string, MetricVector>>& sweep,
                                      const std::string& group) {
  std::vector<ParetoPoint> pts;
  for (const auto& [name, mv] : sweep) {
    if (mv.area && mv.delay) pts.push_back({group, name, *mv.area, *mv.delay, true});
  }
  for (auto& p : pts) {
    for (const auto& q : pts) {
      const bool le = q.area <= p.area && q.delay <= p.delay;
      const bool lt = q.area < p.area || q.delay < p.delay;
      if (le && lt) {
        p.non_dominated = false;
        break;
      }
    }
  }
  return pts;
}

std::string emit_pareto_csv(const std::vector<ParetoPoint>& points) {
  std::ostringstream os;
  os << "group,strategy,area,delay,non_dominated\n";
  for (const auto& p : points) {
    os << p.group << ',' << p.strategy << ',' << fmt3(p.area) << ',' << fmt3(p.delay) << ','
       << (p.non_dominated ? "true" : "false") << '\n';
  }
  return os.str();
}

DistributionData distribution_data(const std::map<std::string, MetricVector>& before,
                                   const std::map<std::string, MetricVector>& after) {
  for (const auto& [id, v] : before) {
    if (!after.count(id)) throw Error(ErrorKind::UnpairedProblem, id + " has no 'after' entry", id);
  }
  for (const auto& [id, v] : after) {
    if (!before.count(id)) throw Error(ErrorKind::UnpairedProblem, id + " has no 'before' entry", id);
  }
  DistributionData d;
  std::array<double, 3> sum{};
  std::array<int, 3> cnt{};
  for (const auto& [id, b] : before) {
    const auto& a = after.at(id);
    for (auto m : kAllMetrics) {
      const auto& bv = b.get(m);
      const auto& av = a.get(m);
      if (!bv || !av || *bv <= 0.0) continue;
      const double red = 100.0 * (*bv - *av) / *bv;
      d.rows.push_back({id, m, *bv, *av, red});
      sum[index_of(m)] += red;
      ++cnt[index_of(m)];
    }
  }
  for (auto m : kAllMetrics) {
    if (cnt[index_of(m)]) d.mean_reduction_pct[index_of(m)] = sum[index_of(m)] / cnt[index_of(m)];
  }
  return d;
}

std::string emit_distribution_csv(const DistributionData& d) {
  std::ostringstream os;
  os << "problem,metric,before,after,reduction_pct\n";
  for (const auto& r : d.rows) {
    os << r.problem_id << ',' << to_string(r.metric) << ',' << fmt3(r.before) << ','
       << fmt3(r.after) << ',' << fmt3(r.reduction_pct) << '\n';
  }
  for (auto m : kAllMetrics) {
    os << "mean," << to_string(m) << ",,," << fmt3(d.mean_reduction_pct[index_of(m)]) << '\n';
  }
  return os.str();
}

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json line_json(const ScoreLine& l) {
  json eff = json::object();
  for (auto m : kAllMetrics) {
    json a = json::array();
    for (const auto& v : l.eff[index_of(m)]) a.push_back(opt_json(v));
    eff[std::string(to_string(m))] = a;
  }
  return {{"units", l.units}, {"pass", l.pass}, {"eff", eff}};
}

ScoreLine line_from(const json& j) {
  ScoreLine l;
  l.units = j.at("units").get<std::size_t>();
  l.pass = j.at("pass").get<std::vector<double>>();
  for (auto m : kAllMetrics) {
    for (const auto& v : j.at("eff").at(std::string(to_string(m)))) {
      l.eff[index_of(m)].push_back(opt_from(v));
    }
  }
  return l;
}

CellState cell_state_from(const std::string& s) {
  for (auto c : {CellState::NotRequested, CellState::Degenerate, CellState::Scored}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown cell state '" + s + "'");
}

}  // namespace

json to_json(const RunReport& r) {
  json rows = json::array();
  for (const auto& row : r.scores.rows) {
    json eff = json::object();
    json best = json::object();
    json state = json::object();
    for (auto m : kAllMetrics) {
      const std::string name(to_string(m));
      json a = json::array();
      for (const auto& v : row.eff[index_of(m)]) a.push_back(opt_json(v));
      eff[name] = a;
      best[name] = opt_json(row.best_e[index_of(m)]);
      state[name] = std::string(to_string(row.state[index_of(m)]));
    }
    rows.push_back({{"problem", row.problem_id},
                    {"difficulty", std::string(to_string(row.difficulty))},
                    {"target", std::string(to_string(row.target))},
                    {"n", row.n},
                    {"c", row.c},
                    {"state", state},
                    {"pass", row.pass},
                    {"eff", eff},
                    {"best_e", best},
                    {"outcomes", row.outcomes}});
  }
  json by_diff = json::object();
  for (const auto& [d, l] : r.scores.by_difficulty) by_diff[std::string(to_string(d))] = line_json(l);
  return {{"run_id", r.run_id},
          {"config", r.config},
          {"correctness", r.correctness},
          {"started_at", r.started_at},
          {"finished_at", r.finished_at},
          {"scores",
           {{"ks", r.scores.ks},
            {"overall", line_json(r.scores.overall)},
            {"by_difficulty", by_diff},
            {"rows", rows}}}};
}

RunReport run_report_from_json(const json& j) {
  RunReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.config = j.at("config");
  r.correctness = j.at("correctness").get<std::string>();
  r.started_at = j.at("started_at").get<std::string>();
  r.finished_at = j.at("finished_at").get<std::string>();
  const auto& s = j.at("scores");
  r.scores.ks = s.at("ks").get<std::vector<int>>();
  r.scores.overall = line_from(s.at("overall"));
  for (const auto& [d, l] : s.at("by_difficulty").items()) {
    r.scores.by_difficulty[parse_difficulty(d)] = line_from(l);
  }
  for (const auto& row : s.at("rows")) {
    RowScores rs;
    rs.problem_id = row.at("problem").get<std::string>();
    rs.difficulty = parse_difficulty(row.at("difficulty").get<std::string>());
    rs.target = parse_metric_kind(row.at("target").get<std::string>());
    rs.n = row.at("n").get<int>();
    rs.c = row.at("c").get<int>();
    rs.pass = row.at("pass").get<std::vector<double>>();
    for (auto m : kAllMetrics) {
      const std::string name(to_string(m));
      for (const auto& v : row.at("eff").at(name)) rs.eff[index_of(m)].push_back(opt_from(v));
      rs.best_e[index_of(m)] = opt_from(row.at("best_e").at(name));
      rs.state[index_of(m)] = cell_state_from(row.at("state").at(name).get<std::string>());
    }
    rs.outcomes = row.at("outcomes").get<std::map<std::string, int>>();
    r.scores.rows.push_back(std::move(rs));
  }
  return r;
}

void write_run_report(const RunReport& r, const std::filesystem::path& dir,
                      const std::vector<ParetoPoint>* pareto,
                      const DistributionData* distributions) {
  const auto& sc = r.scores;
  write_text_file(dir / "scores.csv", emit_score_table(sc, TableFormat::Csv));
  write_text_file(dir / "scores.json", emit_score_table(sc, TableFormat::Json));
  const int kmin = *std::min_element(sc.ks.begin(), sc.ks.end());
  write_text_file(dir / "quadrant.csv", emit_quadrant_csv(quadrant_points(sc, kmin)));
  write_text_file(dir / "report.json", to_json(r).dump(2) + "\n");
  if (pareto) write_text_file(dir / "pareto.csv", emit_pareto_csv(*pareto));
  if (distributions) write_text_file(dir / "distributions.csv", emit_distribution_csv(*distributions));

  std::ostringstream md;
  md << "# Run " << r.run_id << "\n\n";
  const auto cfg_str = [&](const char* key) {
    return r.config.contains(key) && r.config[key].is_string() ? r.config[key].get<std::string>()
                                                               : std::string("-");
  };
  md << "- formulation: " << cfg_str("formulation") << "\n";
  md << "- model: " << cfg_str("model") << "\n";
  md << "- backend: " << cfg_str("backend") << " (strategy " << cfg_str("strategy") << ")\n";
  md << "- threshold policy: " << cfg_str("threshold_policy") << "\n";
  md << "- correctness: " << r.correctness << "\n";
  if (r.config.contains("n")) md << "- samples per problem and metric: " << r.config["n"] << "\n";
  md << "- started: " << r.started_at << ", finished: " << r.finished_at << "\n\n";
  md << "## Suite scores\n\n" << emit_score_table(sc, TableFormat::Markdown) << "\n";
  md << "## By difficulty\n\n" << emit_difficulty_table(sc, TableFormat::Markdown) << "\n";

  md << "## Per problem (k=" << kmin << ")\n\n";
  md << "| problem | difficulty | target | n | c | pass@" << kmin << " | eff@" << kmin
     << " | best e | outcomes |\n|---|---|---|---:|---:|---:|---:|---:|---|\n";
  const auto ki = static_cast<std::size_t>(
      std::find(sc.ks.begin(), sc.ks.end(), kmin) - sc.ks.begin());
  for (const auto& row : sc.rows) {
    const auto t = index_of(row.target);
    const std::string eff = row.state[t] == CellState::Degenerate ? "degenerate"
                                                                  : fmt3(row.eff[t][ki]);
    md << "| " << row.problem_id << " | " << to_string(row.difficulty) << " | "
       << to_string(row.target) << " | " << row.n << " | " << row.c << " | "
       << fmt3(row.pass[ki]) << " | " << eff << " | " << fmt3(row.best_e[t]) << " | "
       << outcomes_text(row.outcomes) << " |\n";
  }
  if (distributions) {
    md << "\n## Reference reductions against the baseline\n\n";
    for (auto m : kAllMetrics) {
      md << "- " << to_string(m) << ": "
         << fmt3(distributions->mean_reduction_pct[index_of(m)]) << "% mean\n";
    }
  }
  write_text_file(dir / "report.md", md.str());
}

}  // namespace effbench
