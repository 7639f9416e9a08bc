#include "effbench/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <set>
#include <sstream>

#include "effbench/error.hpp"
#include "effbench/http_chat_client.hpp"
#include "effbench/process.hpp"
#include "effbench/record_log.hpp"
#include "effbench/sim_harness.hpp"
#include "effbench/synth_harness.hpp"
#include "effbench/verilog.hpp"
#include "effbench/worker_pool.hpp"

namespace effbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(CorrectnessMode m) {
  return m == CorrectnessMode::SimOnly ? "sim-only" : "sim+synth";
}

CorrectnessMode parse_correctness_mode(std::string_view s) {
  if (s == "sim+synth" || s == "sim-and-synth") return CorrectnessMode::SimAndSynth;
  if (s == "sim-only") return CorrectnessMode::SimOnly;
  throw Error(ErrorKind::InvalidConfig, "unknown correctness mode '" + std::string(s) + "'");
}

std::string_view to_string(ClientKind k) {
  switch (k) {
    case ClientKind::Http: return "http";
    case ClientKind::MockReferences: return "mock-references";
    case ClientKind::MockBaseline: return "mock-baseline";
    case ClientKind::MockMixed: return "mock-mixed";
  }
  return "http";
}

ClientKind parse_client_kind(std::string_view s) {
  for (auto k : {ClientKind::Http, ClientKind::MockReferences, ClientKind::MockBaseline,
                 ClientKind::MockMixed}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown model client '" + std::string(s) + "'");
}

void RunConfig::validate() const {
  gen.validate();
  if (targets.empty()) throw Error(ErrorKind::InvalidConfig, "no target metric selected");
  if (ks.empty()) throw Error(ErrorKind::InvalidConfig, "no k selected");
  for (int k : ks) {
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "k must be >= 1", std::to_string(k));
  }
  const int kmax = *std::max_element(ks.begin(), ks.end());
  if (gen.n < kmax) {
    throw Error(ErrorKind::InvalidConfig,
                "n=" + std::to_string(gen.n) + " is smaller than the largest k (" +
                    std::to_string(kmax) + ")");
  }
  if (workers < 1) throw Error(ErrorKind::InvalidConfig, "workers must be >= 1");
}

json RunConfig::identity(const Suite& suite) const {
  json problems = json::array();
  for (const auto& b : suite.bundles) problems.push_back(b.id);
  json t = json::array();
  for (auto m : targets) t.push_back(std::string(to_string(m)));
  json j = {{"suite", suite.name},
            {"problems", problems},
            {"formulation", std::string(to_string(formulation))},
            {"client", std::string(to_string(client))},
            {"model", gen.model_name},
            {"n", gen.n},
            {"temperature", gen.temperature},
            {"max_tokens", gen.max_tokens},
            {"targets", t},
            {"backend", backend},
            {"strategy", strategy},
            {"simulator", simulator}};
  if (client == ClientKind::Http) j["endpoint"] = gen.endpoint_url;
  return j;
}

json RunConfig::snapshot(const Suite& suite) const {
  auto j = identity(suite);
  j["ks"] = ks;
  j["correctness"] = std::string(to_string(correctness));
  j["clamp"] = clamp;
  j["threshold_policy"] = std::string(to_string(suite.threshold_policy));
  return j;
}

std::string config_hash(const json& identity) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(verilog::fnv1a64(identity.dump())));
  return buf;
}

fs::path default_mocksim_path() {
  if (const char* env = std::getenv("EFFBENCH_MOCKSIM"); env && *env) return env;
  std::error_code ec;
  const auto self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return "effbench-mocksim";
  return self.parent_path() / "effbench-mocksim";
}

namespace {

std::string now_utc() {
  const auto t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string tail(const std::string& s, std::size_t n = 400) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

const std::vector<DesignRole> kRoles{DesignRole::Unopt, DesignRole::OptArea, DesignRole::OptDelay,
                                     DesignRole::OptPower};

std::string ref_key(const std::string& pid, DesignRole r) {
  return "ref/" + pid + "/" + std::string(to_string(r));
}

std::string sample_key(const char* stage, const std::string& pid, MetricKind t, int j) {
  return std::string(stage) + "/" + pid + "/" + std::string(to_string(t)) + "/" + std::to_string(j);
}

json synth_payload(const SynthOutcome& o) {
  json j = {{"status", std::string(to_string(o.status))}, {"metrics", metrics_to_json(o.metrics)}};
  if (o.status != SynthStatus::Ok) j["error"] = tail(o.log);
  return j;
}

SynthOptions synth_options(const ProblemBundle& b, const fs::path& scratch, bool keep) {
  SynthOptions so;
  so.top = b.dut_name();
  so.header_ports = b.header_ports();
  so.scratch_parent = scratch;
  so.keep_artifacts = keep;
  return so;
}

SimConfig sim_config(const SimulatorProfile& p, const fs::path& mocksim, const fs::path& scratch,
                     bool keep) {
  const auto exe = mocksim.empty() ? default_mocksim_path() : mocksim;
  auto c = p.to_sim_config({{"mocksim", shell_quote(exe.string())}});
  c.scratch_parent = scratch;
  c.keep_artifacts = keep;
  return c;
}

json suite_snapshot(const Suite& suite) {
  json problems = json::array();
  for (const auto& b : suite.bundles) {
    problems.push_back({{"id", b.id}, {"difficulty", std::string(to_string(b.difficulty))}});
  }
  json thresholds = json::object();
  for (const auto& [id, v] : suite.threshold_overrides) thresholds[id] = metrics_to_json(v);
  return {{"name", suite.name},
          {"threshold_policy", std::string(to_string(suite.threshold_policy))},
          {"thresholds", thresholds},
          {"problems", problems}};
}

json read_run_json(const fs::path& run_dir) {
  const auto p = run_dir / "run.json";
  std::error_code ec;
  if (!fs::exists(p, ec)) {
    throw Error(ErrorKind::IncompleteRun, p.string() + " does not exist", p.string());
  }
  const auto j = json::parse(read_text_file(p), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Io, p.string() + " is not valid JSON", p.string());
  return j;
}

std::unique_ptr<ChatClient> make_client(const RunConfig& cfg, const Suite& suite) {
  switch (cfg.client) {
    case ClientKind::Http:
      return std::make_unique<HttpChatClient>(cfg.gen.endpoint_url, cfg.gen.auth_env);
    case ClientKind::MockReferences:
      return std::make_unique<MockChatClient>(suite.bundles, MockChatClient::Mode::References);
    case ClientKind::MockBaseline:
      return std::make_unique<MockChatClient>(suite.bundles, MockChatClient::Mode::Baseline);
    case ClientKind::MockMixed:
      return std::make_unique<MockChatClient>(suite.bundles, MockChatClient::Mode::Mixed);
  }
  return nullptr;
}

struct EvalJob {
  const ProblemBundle* bundle;
  MetricKind target;
  const CandidateSample* sample;
};

json evaluate_sim(const EvalJob& job, const SimConfig& sc) {
  const auto& s = *job.sample;
  json j = {{"extraction", std::string(to_string(s.extraction_status))},
            {"status", nullptr},
            {"mismatches", 0}};
  if (!s.extracted_src) {
    if (!s.error.empty()) j["detail"] = s.error;
    return j;
  }
  j["fingerprint"] = verilog::design_fingerprint(*s.extracted_src, job.bundle->header_ports());
  try {
    const auto files = compose_sim_unit(*s.extracted_src, *job.bundle);
    const auto v = run_simulation(files, sc);
    j["status"] = std::string(to_string(v.status));
    j["mismatches"] = v.mismatches;
    if (v.status != SimStatus::Pass) j["detail"] = tail(v.transcript);
  } catch (const Error& e) {
    if (e.is_environment()) throw;
    j["status"] = std::string(to_string(SimStatus::CompileError));
    j["detail"] = e.what();
  }
  return j;
}

// Pareto points and reference reductions from the ref/ records.
void reference_views(const std::map<std::string, json>& recs, const json& problems,
                     std::vector<ParetoPoint>& pareto, DistributionData& dist) {
  std::map<std::string, MetricVector> before;
  std::map<std::string, MetricVector> after;
  for (const auto& p : problems) {
    const auto pid = p.at("id").get<std::string>();
    std::map<DesignRole, MetricVector> ok;
    for (auto r : kRoles) {
      const auto it = recs.find(ref_key(pid, r));
      if (it == recs.end() || it->second.value("status", "") != "ok") continue;
      ok[r] = metrics_from_json(it->second.at("metrics"));
    }
    std::vector<std::pair<std::string, MetricVector>> pts;
    for (const auto& [r, v] : ok) pts.emplace_back(std::string(to_string(r)), v);
    const auto front = pareto_front(pts, pid);
    pareto.insert(pareto.end(), front.begin(), front.end());
    if (ok.size() != kRoles.size()) continue;
    before[pid] = ok[DesignRole::Unopt];
    MetricVector a;
    for (auto m : kAllMetrics) a.get(m) = ok[reference_role(m)].get(m);
    after[pid] = a;
  }
  dist = distribution_data(before, after);
}

std::map<std::string, json> record_map(const fs::path& run_dir) {
  std::map<std::string, json> out;
  for (auto& r : RecordLog::read(run_dir / "records.jsonl")) out.emplace(r.key, std::move(r.payload));
  return out;
}

ScoreOptions options_from(const RunConfig& cfg) {
  ScoreOptions o;
  o.ks = cfg.ks;
  o.correctness = cfg.correctness;
  o.clamp = cfg.clamp;
  return o;
}

RunReport make_report(const fs::path& run_dir, const ScoreOptions& opts) {
  const auto run = read_run_json(run_dir);
  RunReport r;
  r.run_id = run.at("run_id").get<std::string>();
  r.config = run.at("snapshot");
  if (opts.ks) r.config["ks"] = *opts.ks;
  if (opts.correctness) r.config["correctness"] = std::string(to_string(*opts.correctness));
  if (opts.clamp) r.config["clamp"] = *opts.clamp;
  if (opts.policy) r.config["threshold_policy"] = std::string(to_string(*opts.policy));
  r.correctness = r.config.at("correctness").get<std::string>();
  r.scores = cmd_score(run_dir, opts);
  r.started_at = run.at("started_at").get<std::string>();
  r.finished_at = now_utc();

  const auto recs = record_map(run_dir);
  std::vector<ParetoPoint> pareto;
  DistributionData dist;
  reference_views(recs, run.at("suite").at("problems"), pareto, dist);
  write_run_report(r, run_dir, &pareto, &dist);
  return r;
}

}  // namespace

RunReport cmd_run(const RunConfig& cfg, const fs::path& run_dir, ChatClient* client_override,
                  const Progress& progress) {
  const auto say = [&](const std::string& s) {
    if (progress) progress(s);
  };
  cfg.validate();
  const auto suite = load_suite(cfg.suite);
  if (suite.bundles.empty()) throw Error(ErrorKind::EmptySuite, "suite has no problems");
  const auto tc = load_toolchains(cfg.toolchains);
  const auto& backend = tc.backend(cfg.backend);
  const auto* strategy = backend.strategy(cfg.strategy);
  if (!strategy) {
    throw Error(ErrorKind::InvalidConfig,
                "backend '" + backend.name + "' has no strategy '" + cfg.strategy + "'", cfg.strategy);
  }
  for (auto m : cfg.targets) {
    if (!backend.supports(m)) {
      throw Error(ErrorKind::InvalidConfig,
                  "backend '" + backend.name + "' does not report " + std::string(to_string(m)));
    }
  }
  const auto sc = sim_config(tc.simulator(cfg.simulator), cfg.mocksim, cfg.scratch_parent,
                             cfg.keep_artifacts);

  std::unique_ptr<ChatClient> owned;
  ChatClient* client = client_override;
  if (!client) {
    owned = make_client(cfg, suite);
    client = owned.get();
  }

  const auto identity = cfg.identity(suite);
  const auto hash = config_hash(identity);
  fs::create_directories(run_dir);
  json run;
  std::error_code ec;
  if (fs::exists(run_dir / "run.json", ec)) {
    run = read_run_json(run_dir);
    if (run.value("config_hash", "") != hash) {
      throw Error(ErrorKind::ConfigMismatch,
                  run_dir.string() + " holds a run with a different configuration (" +
                      run.value("config_hash", "?") + " vs " + hash + ")",
                  run_dir.string());
    }
  } else {
    run = {{"run_id", "run-" + hash.substr(0, 12)},
           {"config_hash", hash},
           {"identity", identity},
           {"suite", suite_snapshot(suite)},
           {"started_at", now_utc()}};
  }
  run["snapshot"] = cfg.snapshot(suite);
  write_text_file(run_dir / "run.json", run.dump(2) + "\n");

  RecordLog log(run_dir / "records.jsonl", hash);
  if (log.size()) say("resuming with " + std::to_string(log.size()) + " records");

  // reference synthesis
  std::vector<std::pair<const ProblemBundle*, DesignRole>> refs;
  for (const auto& b : suite.bundles) {
    for (auto r : kRoles) {
      if (!log.contains(ref_key(b.id, r))) refs.emplace_back(&b, r);
    }
  }
  say("reference synthesis: " + std::to_string(refs.size()) + " jobs");
  parallel_for(refs.size(), cfg.workers, [&](std::size_t i) {
    const auto& [b, role] = refs[i];
    const auto out = synthesize_renamed(b->design(role), backend, *strategy,
                                        synth_options(*b, cfg.scratch_parent, cfg.keep_artifacts));
    log.append("ref-synth", ref_key(b->id, role), synth_payload(out));
  });

  // generation
  std::map<std::pair<std::string, MetricKind>, std::vector<CandidateSample>> samples;
  for (const auto& b : suite.bundles) {
    for (auto t : cfg.targets) {
      auto gen = cfg.gen;
      gen.target_metric = t;
      const auto sink = [&](int j, const ChatResponse& resp) {
        log.append("gen", sample_key("gen", b.id, t, j),
                   {{"ok", resp.ok}, {"content", resp.content}, {"error", resp.error}});
      };
      const auto cache = [&](int j) -> std::optional<ChatResponse> {
        const auto p = log.lookup(sample_key("gen", b.id, t, j));
        if (!p) return std::nullopt;
        return ChatResponse{p->at("ok").get<bool>(), p->at("content").get<std::string>(),
                            p->value("error", "")};
      };
      samples[{b.id, t}] = generate_samples(b, gen, cfg.formulation, *client, sink, cache, cfg.workers);
    }
  }
  say("generation: " + std::to_string(suite.bundles.size() * cfg.targets.size() * cfg.gen.n) +
      " samples");

  // simulation and synthesis of candidates
  std::vector<EvalJob> jobs;
  for (const auto& b : suite.bundles) {
    for (auto t : cfg.targets) {
      for (const auto& s : samples[{b.id, t}]) {
        if (!log.contains(sample_key("sim", b.id, t, s.sample_index)) ||
            !log.contains(sample_key("synth", b.id, t, s.sample_index))) {
          jobs.push_back({&b, t, &s});
        }
      }
    }
  }
  say("evaluation: " + std::to_string(jobs.size()) + " samples pending");
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const auto& job = jobs[i];
    const auto& pid = job.bundle->id;
    const int j = job.sample->sample_index;
    const auto skey = sample_key("sim", pid, job.target, j);
    if (!log.contains(skey)) log.append("sim", skey, evaluate_sim(job, sc));
    const auto sim = *log.lookup(skey);
    const auto ykey = sample_key("synth", pid, job.target, j);
    if (log.contains(ykey)) return;
    if (sim.at("status") != "pass") {
      log.append("synth", ykey, {{"status", "skipped"}});
      return;
    }
    const auto out = synthesize_renamed(*job.sample->extracted_src, backend, *strategy,
                                        synth_options(*job.bundle, cfg.scratch_parent,
                                                      cfg.keep_artifacts));
    log.append("synth", ykey, synth_payload(out));
  });

  say("scoring");
  return make_report(run_dir, options_from(cfg));
}

ScoreTable build_score_table(const fs::path& run_dir, const ScoreOptions& opts) {
  const auto run = read_run_json(run_dir);
  const auto& identity = run.at("identity");
  const auto& snap = run.at("snapshot");
  const auto& suite = run.at("suite");
  const int n = identity.at("n").get<int>();
  std::vector<MetricKind> targets;
  for (const auto& t : identity.at("targets")) targets.push_back(parse_metric_kind(t.get<std::string>()));

  const auto mode = opts.correctness.value_or(parse_correctness_mode(snap.at("correctness").get<std::string>()));
  const bool clamp = opts.clamp.value_or(snap.at("clamp").get<bool>());
  const auto policy = opts.policy.value_or(
      parse_threshold_policy(suite.at("threshold_policy").get<std::string>()));
  std::map<std::string, MetricVector> thresholds;
  if (opts.thresholds) {
    thresholds = *opts.thresholds;
  } else {
    for (const auto& [id, v] : suite.at("thresholds").items()) thresholds[id] = metrics_from_json(v);
  }

  const auto recs = record_map(run_dir);
  std::vector<std::string> missing;
  const auto need = [&](const std::string& key) -> const json* {
    const auto it = recs.find(key);
    if (it == recs.end()) {
      missing.push_back(key);
      return nullptr;
    }
    return &it->second;
  };

  ScoreTable table;
  for (const auto& p : suite.at("problems")) {
    const auto pid = p.at("id").get<std::string>();
    const auto diff = parse_difficulty(p.at("difficulty").get<std::string>());
    const auto* base = need(ref_key(pid, DesignRole::Unopt));
    for (auto t : targets) {
      ScoreRow row;
      row.problem_id = pid;
      row.difficulty = diff;
      row.target = t;
      const auto* ref = need(ref_key(pid, reference_role(t)));
      std::vector<std::optional<double>> measured;
      for (int j = 0; j < n; ++j) {
        const auto* sim = need(sample_key("sim", pid, t, j));
        const auto* syn = need(sample_key("synth", pid, t, j));
        if (!sim || !syn) continue;
        std::string outcome = sim->at("status").is_null() ? sim->at("extraction").get<std::string>()
                                                          : sim->at("status").get<std::string>();
        const bool sim_pass = outcome == "pass";
        const auto synth_status = syn->at("status").get<std::string>();
        const bool synth_ok = synth_status == "ok";
        if (sim_pass && !synth_ok) outcome = "synth_" + synth_status;
        ++row.outcomes[outcome];
        row.correct.push_back(sim_pass && (mode == CorrectnessMode::SimOnly || synth_ok));
        measured.push_back(synth_ok ? metrics_from_json(syn->at("metrics")).get(t) : std::nullopt);
      }
      if (!base || !ref || static_cast<int>(row.correct.size()) != n) continue;

      std::optional<double> T;
      if (const auto it = thresholds.find(pid); it != thresholds.end() && it->second.get(t)) {
        T = it->second.get(t);
      } else if (policy == ThresholdPolicy::Explicit) {
        throw Error(ErrorKind::InvalidConfig,
                    "explicit threshold policy without a " + std::string(to_string(t)) +
                        " bound for " + pid, pid);
      } else if (base->value("status", "") == "ok") {
        T = metrics_from_json(base->at("metrics")).get(t);
      }
      std::optional<double> R;
      if (ref->value("status", "") == "ok") R = metrics_from_json(ref->at("metrics")).get(t);

      auto& state = row.state[index_of(t)];
      if (!T || !R || *T <= *R) {
        state = CellState::Degenerate;
      } else {
        state = CellState::Scored;
        auto& e = row.e[index_of(t)];
        for (int j = 0; j < n; ++j) {
          const auto& mj = measured[static_cast<std::size_t>(j)];
          e.push_back(row.correct[static_cast<std::size_t>(j)] && mj
                          ? efficiency_score(*mj, *T, *R, true, clamp)
                          : 0.0);
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += "\n  " + missing[i];
    if (missing.size() > 20) list += "\n  ... " + std::to_string(missing.size() - 20) + " more";
    throw Error(ErrorKind::IncompleteRun,
                std::to_string(missing.size()) + " records missing:" + list, missing.front());
  }
  return table;
}

SuiteScores cmd_score(const fs::path& run_dir, const ScoreOptions& opts) {
  auto ks = opts.ks;
  if (!ks) ks = read_run_json(run_dir).at("snapshot").at("ks").get<std::vector<int>>();
  return score_suite(build_score_table(run_dir, opts), *ks);
}

RunReport cmd_report(const fs::path& run_dir, const ScoreOptions& opts) {
  return make_report(run_dir, opts);
}

bool AuditResult::ok() const {
  return std::none_of(rows.begin(), rows.end(), [](const AuditRow& r) { return r.hard_failure(); });
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '|', '/');
  return s;
}

}  // namespace

AuditResult cmd_verify_refs(const Suite& suite, const Toolchains& tc, const VerifyOptions& opts,
                            const fs::path& out_dir) {
  if (suite.bundles.empty()) throw Error(ErrorKind::EmptySuite, "suite has no problems");
  const auto& backend = tc.backend(opts.backend);
  const auto* strategy = backend.strategy(opts.strategy);
  if (!strategy) {
    throw Error(ErrorKind::InvalidConfig,
                "backend '" + backend.name + "' has no strategy '" + opts.strategy + "'", opts.strategy);
  }
  const auto sc = sim_config(tc.simulator(opts.simulator), opts.mocksim, opts.scratch_parent,
                             opts.keep_artifacts);

  const std::size_t nb = suite.bundles.size();
  std::vector<std::array<SimVerdict, 4>> sims(nb);
  std::vector<std::array<SynthOutcome, 4>> synths(nb);
  parallel_for(nb * 8, opts.workers, [&](std::size_t i) {
    const auto& b = suite.bundles[i / 8];
    const auto role = kRoles[i % 4];
    if (i % 8 < 4) {
      sims[i / 8][i % 4] = run_simulation(compose_sim_unit(b.design(role), b), sc);
    } else {
      synths[i / 8][i % 4] = synthesize_renamed(
          b.design(role), backend, *strategy, synth_options(b, opts.scratch_parent, opts.keep_artifacts));
    }
  });

  AuditResult res;
  std::map<std::string, MetricVector> before;
  std::map<std::string, MetricVector> after;
  for (std::size_t bi = 0; bi < nb; ++bi) {
    const auto& b = suite.bundles[bi];
    const auto add = [&](std::string check, std::string status, std::string detail) {
      res.rows.push_back({b.id, std::move(check), std::move(status), std::move(detail)});
    };
    const auto vr = validate_bundle(b);
    std::string failed;
    for (const auto& c : vr.checks) {
      if (!c.passed) failed += (failed.empty() ? "" : "; ") + c.name + ": " + c.detail;
    }
    add("bundle", vr.ok() ? "pass" : "fail", failed);

    for (std::size_t r = 0; r < 4; ++r) {
      const auto& v = sims[bi][r];
      std::string detail(to_string(v.status));
      if (v.status == SimStatus::Mismatch) detail += " (" + std::to_string(v.mismatches) + ")";
      if (r == 0) detail += ", baseline against itself";
      add("sim/" + std::string(to_string(kRoles[r])), v.status == SimStatus::Pass ? "pass" : "fail",
          detail);
    }
    for (std::size_t r = 0; r < 4; ++r) {
      const auto& s = synths[bi][r];
      add("synth/" + std::string(to_string(kRoles[r])), s.status == SynthStatus::Ok ? "pass" : "fail",
          s.status == SynthStatus::Ok ? "ok" : std::string(to_string(s.status)) + ": " + tail(s.log, 160));
    }
    const auto& base = synths[bi][0];
    MetricVector a;
    bool all_ok = base.status == SynthStatus::Ok;
    for (auto m : kAllMetrics) {
      const auto idx = static_cast<std::size_t>(
          std::find(kRoles.begin(), kRoles.end(), reference_role(m)) - kRoles.begin());
      const auto& ref = synths[bi][idx];
      const std::string check = "direction/" + std::string(to_string(m));
      all_ok = all_ok && ref.status == SynthStatus::Ok;
      if (!backend.supports(m)) {
        add(check, "n/a", "backend does not report " + std::string(to_string(m)));
        continue;
      }
      const auto& bv = base.metrics.get(m);
      const auto& rv = ref.metrics.get(m);
      if (base.status != SynthStatus::Ok || ref.status != SynthStatus::Ok || !bv || !rv) {
        add(check, "fail", "metric unavailable");
        continue;
      }
      a.get(m) = rv;
      const std::string detail = fmt3(*bv) + " -> " + fmt3(*rv) + " (" +
                                 fmt3(100.0 * (*bv - *rv) / *bv) + "% reduction)";
      if (*rv < *bv) {
        add(check, "pass", detail);
      } else if (*rv == *bv) {
        add(check, "degenerate", detail);
      } else {
        add(check, "fail", detail);
      }
    }
    if (all_ok) {
      before[b.id] = base.metrics;
      after[b.id] = a;
    }
  }
  res.distributions = distribution_data(before, after);

  fs::create_directories(out_dir);
  std::ostringstream csv;
  std::ostringstream md;
  csv << "problem,check,status,detail\n";
  md << "# Reference audit\n\n- backend: " << backend.name << " (strategy " << strategy->name
     << ")\n- simulator: " << opts.simulator << "\n- result: " << (res.ok() ? "all hard checks pass" : "FAILURES")
     << "\n\n| problem | check | status | detail |\n|---|---|---|---|\n";
  for (const auto& r : res.rows) {
    csv << r.problem_id << ',' << r.check << ',' << r.status << ',' << csv_field(r.detail) << '\n';
    md << "| " << r.problem_id << " | " << r.check << " | " << r.status << " | " << one_line(r.detail)
       << " |\n";
  }
  md << "\n## Mean reduction of each reference in its own metric\n\n";
  for (auto m : kAllMetrics) {
    md << "- " << to_string(m) << ": " << fmt3(res.distributions.mean_reduction_pct[index_of(m)])
       << "%\n";
  }
  write_text_file(out_dir / "audit.csv", csv.str());
  write_text_file(out_dir / "audit.md", md.str());
  write_text_file(out_dir / "distributions.csv", emit_distribution_csv(res.distributions));
  return res;
}

}  // namespace effbench
