#include "effbench/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "effbench/error.hpp"
#include "effbench/metrics.hpp"
#include "effbench/process.hpp"
#include "effbench/worker_pool.hpp"

namespace effbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<StrategyScript> SweepPlan::strategies_for(const SynthBackend& b) const {
  if (strategies.empty()) {
    if (b.strategies.empty()) {
      throw Error(ErrorKind::InvalidConfig, "backend '" + b.name + "' declares no strategy", b.name);
    }
    return b.strategies;
  }
  std::vector<StrategyScript> out;
  for (const auto& name : strategies) {
    if (const auto* s = b.strategy(name)) out.push_back(*s);
  }
  if (out.empty()) {
    throw Error(ErrorKind::InvalidConfig,
                "backend '" + b.name + "' supports none of the requested strategies", b.name);
  }
  return out;
}

std::size_t SweepPlan::total_jobs() const {
  std::size_t total = 0;
  for (const auto& b : backends) total += problems.size() * designs.size() * strategies_for(b).size();
  if (total == 0) throw Error(ErrorKind::InvalidConfig, "sweep plan has no cells");
  return total;
}

namespace {

std::vector<std::string> string_list(const YAML::Node& n, const char* key) {
  std::vector<std::string> out;
  if (!n[key]) return out;
  if (!n[key].IsSequence()) {
    throw Error(ErrorKind::InvalidConfig, std::string("'") + key + "' must be a list", key);
  }
  for (const auto& v : n[key]) out.push_back(v.as<std::string>());
  return out;
}

}  // namespace

SweepPlan load_sweep_plan(const fs::path& file, const Toolchains& tc) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::InvalidConfig, file.string() + ": " + e.what(), file.string());
  }
  if (!root["suite"]) throw Error(ErrorKind::InvalidConfig, file.string() + ": missing 'suite'");
  const auto suite = load_suite(file.parent_path() / root["suite"].as<std::string>());

  SweepPlan plan;
  const auto ids = string_list(root, "problems");
  if (ids.empty()) {
    plan.problems = suite.bundles;
  } else {
    for (const auto& id : ids) {
      const auto* b = suite.find(id);
      if (!b) throw Error(ErrorKind::InvalidConfig, "problem '" + id + "' is not in the suite", id);
      plan.problems.push_back(*b);
    }
  }
  for (const auto& name : string_list(root, "backends")) plan.backends.push_back(tc.backend(name));
  for (const auto& d : string_list(root, "designs")) plan.designs.push_back(parse_design_role(d));
  if (plan.designs.empty()) {
    plan.designs = {DesignRole::Unopt, DesignRole::OptArea, DesignRole::OptDelay, DesignRole::OptPower};
  }
  plan.strategies = string_list(root, "strategies");
  plan.total_jobs();
  return plan;
}

std::string sweep_key(const std::string& backend, const std::string& problem, DesignRole design,
                      const std::string& strategy) {
  return backend + "/" + problem + "/" + std::string(to_string(design)) + "/" + strategy;
}

std::string SweepRecord::key() const { return sweep_key(backend, problem_id, design, strategy); }

json SweepRecord::to_json() const {
  return {{"backend", backend},
          {"problem", problem_id},
          {"design", std::string(to_string(design))},
          {"strategy", strategy},
          {"status", std::string(to_string(status))},
          {"metrics", metrics_to_json(metrics)},
          {"error", error}};
}

SweepRecord SweepRecord::from_json(const json& j) {
  SweepRecord r;
  r.backend = j.at("backend").get<std::string>();
  r.problem_id = j.at("problem").get<std::string>();
  r.design = parse_design_role(j.at("design").get<std::string>());
  r.strategy = j.at("strategy").get<std::string>();
  r.status = parse_synth_status(j.at("status").get<std::string>());
  r.metrics = metrics_from_json(j.at("metrics"));
  r.error = j.value("error", "");
  return r;
}

namespace {

struct Cell {
  const SynthBackend* backend;
  const ProblemBundle* problem;
  DesignRole design;
  StrategyScript strategy;
};

std::string tail(const std::string& s, std::size_t n = 400) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan, RecordLog& log, const SweepOptions& opts) {
  std::vector<Cell> cells;
  for (const auto& b : plan.backends) {
    const auto strategies = plan.strategies_for(b);
    for (const auto& p : plan.problems) {
      for (auto d : plan.designs) {
        for (const auto& s : strategies) cells.push_back({&b, &p, d, s});
      }
    }
  }
  if (cells.empty()) throw Error(ErrorKind::InvalidConfig, "sweep plan has no cells");

  std::vector<const Cell*> todo;
  for (const auto& c : cells) {
    if (!log.contains(sweep_key(c.backend->name, c.problem->id, c.design, c.strategy.name))) {
      todo.push_back(&c);
    }
  }
  SweepResult result;
  result.total_jobs = cells.size();
  result.skipped = cells.size() - todo.size();
  if (opts.on_plan) opts.on_plan(result.total_jobs, result.skipped);

  parallel_for(todo.size(), opts.workers, [&](std::size_t i) {
    const Cell& c = *todo[i];
    SynthOptions so;
    so.top = c.problem->dut_name();
    so.header_ports = c.problem->header_ports();
    so.scratch_parent = opts.scratch_parent;
    so.keep_artifacts = opts.keep_artifacts;
    SweepRecord r;
    r.backend = c.backend->name;
    r.problem_id = c.problem->id;
    r.design = c.design;
    r.strategy = c.strategy.name;
    try {
      const auto out = synthesize_renamed(c.problem->design(c.design), *c.backend, c.strategy, so);
      r.status = out.status;
      r.metrics = out.metrics;
      if (out.status != SynthStatus::Ok) r.error = tail(out.log);
    } catch (const Error& e) {
      if (e.is_environment()) throw;
      r.status = SynthStatus::ToolError;
      r.error = e.what();
    }
    log.append("sweep", r.key(), r.to_json());
  });
  result.executed = todo.size();

  std::set<std::string> wanted;
  for (const auto& c : cells) wanted.insert(sweep_key(c.backend->name, c.problem->id, c.design, c.strategy.name));
  for (const auto& rec : log.records()) {
    if (rec.stage == "sweep" && wanted.count(rec.key)) {
      result.records.push_back(SweepRecord::from_json(rec.payload));
    }
  }
  derive_efficiency(result.records);
  const bool any_ok = std::any_of(result.records.begin(), result.records.end(),
                                  [](const SweepRecord& r) { return r.status == SynthStatus::Ok; });
  if (!any_ok) {
    throw Error(ErrorKind::AllCellsFailed,
                "all " + std::to_string(result.records.size()) + " sweep cells failed");
  }
  return result;
}

void derive_efficiency(std::vector<SweepRecord>& records) {
  // group: backend/problem/strategy
  std::map<std::string, std::map<DesignRole, const SweepRecord*>> groups;
  const auto group_of = [](const SweepRecord& r) {
    return r.backend + "/" + r.problem_id + "/" + r.strategy;
  };
  for (const auto& r : records) {
    if (r.status == SynthStatus::Ok) groups[group_of(r)][r.design] = &r;
  }
  std::vector<std::array<std::optional<double>, 3>> derived(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.status != SynthStatus::Ok) continue;
    const auto& g = groups[group_of(r)];
    const auto base = g.find(DesignRole::Unopt);
    if (base == g.end()) continue;
    for (auto m : kAllMetrics) {
      const auto& measured = r.metrics.get(m);
      const auto& T = base->second->metrics.get(m);
      if (!measured || !T) continue;
      std::optional<double> R;
      if (const auto ref = g.find(reference_role(m)); ref != g.end()) {
        R = ref->second->metrics.get(m);
      } else {
        for (const auto& [d, rec] : g) {
          const auto& v = rec->metrics.get(m);
          if (v && (!R || *v < *R)) R = v;
        }
      }
      if (!R || *T <= *R) continue;
      derived[i][index_of(m)] = efficiency_score(*measured, *T, *R, true);
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) records[i].e = derived[i];
}

BackendEfficiency reference_efficiency(const std::vector<SweepRecord>& records,
                                       const std::string& strategy) {
  std::map<std::string, std::set<std::string>> strategies;
  for (const auto& r : records) strategies[r.backend].insert(r.strategy);
  BackendEfficiency out;
  for (const auto& r : records) {
    const auto& have = strategies[r.backend];
    const std::string& chosen = have.count(strategy) ? strategy : *have.begin();
    if (r.strategy != chosen) continue;
    auto& slot = out[r.backend][r.problem_id];
    for (auto m : kAllMetrics) {
      if (r.design == reference_role(m)) slot[index_of(m)] = r.e[index_of(m)];
    }
  }
  return out;
}

std::vector<ConsistencyRow> consistency_score(const BackendEfficiency& by_backend) {
  std::map<std::pair<std::string, MetricKind>, std::map<std::string, double>> values;
  for (const auto& [backend, problems] : by_backend) {
    for (const auto& [pid, e] : problems) {
      for (auto m : kAllMetrics) {
        if (e[index_of(m)]) values[{pid, m}][backend] = *e[index_of(m)];
      }
    }
  }
  std::vector<ConsistencyRow> rows;
  for (const auto& [key, per_backend] : values) {
    if (per_backend.size() < 2) continue;
    ConsistencyRow row;
    row.problem_id = key.first;
    row.metric = key.second;
    row.e = per_backend;
    double lo = per_backend.begin()->second;
    double hi = lo;
    const bool first_sign = lo > 0.0;
    for (const auto& [b, v] : per_backend) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if ((v > 0.0) != first_sign) row.sign_agreement = false;
    }
    row.spread = hi - lo;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorKind::InsufficientBackends,
                "no problem has efficiency values from two or more backends");
  }
  return rows;
}

std::string emit_sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << "backend,problem,design,strategy,status,area,delay,power,e_area,e_delay,e_power\n";
  for (const auto& r : records) {
    os << r.backend << ',' << r.problem_id << ',' << to_string(r.design) << ',' << r.strategy << ','
       << to_string(r.status);
    for (auto m : kAllMetrics) os << ',' << fmt3(r.metrics.get(m));
    for (auto m : kAllMetrics) os << ',' << fmt3(r.e[index_of(m)]);
    os << '\n';
  }
  return os.str();
}

std::string emit_consistency_csv(const std::vector<ConsistencyRow>& rows) {
  std::ostringstream os;
  os << "problem,metric,backends,spread,sign_agreement,values\n";
  for (const auto& r : rows) {
    std::string values;
    for (const auto& [b, v] : r.e) values += (values.empty() ? "" : " ") + b + "=" + fmt3(v);
    os << r.problem_id << ',' << to_string(r.metric) << ',' << r.e.size() << ',' << fmt3(r.spread)
       << ',' << (r.sign_agreement ? "true" : "false") << ',' << values << '\n';
  }
  return os.str();
}

std::vector<ParetoPoint> sweep_pareto(const std::vector<SweepRecord>& records) {
  std::map<std::string, std::vector<std::pair<std::string, MetricVector>>> groups;
  for (const auto& r : records) {
    if (r.status != SynthStatus::Ok) continue;
    groups[r.backend + "/" + r.problem_id + "/" + std::string(to_string(r.design))].emplace_back(
        r.strategy, r.metrics);
  }
  std::vector<ParetoPoint> out;
  for (const auto& [g, pts] : groups) {
    auto front = pareto_front(pts, g);
    out.insert(out.end(), front.begin(), front.end());
  }
  return out;
}

void write_sweep_outputs(const SweepResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file(dir / "sweep.csv", emit_sweep_csv(result.records));
  write_text_file(dir / "pareto.csv", emit_pareto_csv(sweep_pareto(result.records)));
  const auto eff = reference_efficiency(result.records);
  if (eff.size() >= 2) {
    try {
      write_text_file(dir / "consistency.csv", emit_consistency_csv(consistency_score(eff)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientBackends) throw;
    }
  }
}

}  // namespace effbench
