#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "effbench/error.hpp"
#include "effbench/pipeline.hpp"
#include "effbench/process.hpp"
#include "effbench/record_log.hpp"
#include "eff_oracle.hpp"
#include "test_util.hpp"

using namespace effbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const Suite& suite() {
  static const auto s = load_suite(testutil::suite_manifest());
  return s;
}

// Answers every request with the target's reference plus an appended comment.
class AnnotatingClient : public ChatClient {
 public:
  explicit AnnotatingClient(std::string note) : note_(std::move(note)) {}
  ChatResponse complete(const ChatRequest& req) override {
    auto src = suite().find(req.problem_id)->references.source(req.target_metric);
    src.insert(src.rfind("endmodule"), note_ + "\n");
    return {true, "```verilog\n" + src + "```\n", ""};
  }

 private:
  std::string note_;
};

// Keeps only records.jsonl lines whose key does not start with `prefix`.
void drop_records(const fs::path& run_dir, const std::string& prefix) {
  std::istringstream in(read_text_file(run_dir / "records.jsonl"));
  std::string kept;
  for (std::string line; std::getline(in, line);) {
    if (json::parse(line).at("key").get<std::string>().rfind(prefix, 0) != 0) kept += line + "\n";
  }
  write_text_file(run_dir / "records.jsonl", kept);
}

double pass_at(const SuiteScores& s, int k) {
  for (std::size_t i = 0; i < s.ks.size(); ++i) {
    if (s.ks[i] == k) return s.overall.pass[i];
  }
  throw std::runtime_error("k not scored");
}

std::optional<double> eff_at(const SuiteScores& s, MetricKind m, int k) {
  for (std::size_t i = 0; i < s.ks.size(); ++i) {
    if (s.ks[i] == k) return s.overall.eff[index_of(m)][i];
  }
  throw std::runtime_error("k not scored");
}

int run_cli(const std::string& args) {
  const auto cmd = shell_quote(testutil::cli_path().string()) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(RunConfig, Validation) {
  auto c = testutil::mock_run_config(ClientKind::MockMixed, 4, {1, 5});
  EXPECT_THROW(c.validate(), Error);
  c.ks = {1, 4};
  EXPECT_NO_THROW(c.validate());
  c.targets.clear();
  EXPECT_THROW(c.validate(), Error);
}

TEST(RunConfig, HashIgnoresScoringSettings) {
  auto a = testutil::mock_run_config(ClientKind::MockMixed, 4, {1, 2, 4});
  auto b = a;
  b.ks = {1};
  b.clamp = false;
  b.correctness = CorrectnessMode::SimOnly;
  b.workers = 3;
  EXPECT_EQ(config_hash(a.identity(suite())), config_hash(b.identity(suite())));
  b.gen.n = 5;
  EXPECT_NE(config_hash(a.identity(suite())), config_hash(b.identity(suite())));
  EXPECT_EQ(config_hash(a.identity(suite())).size(), 16u);
}

TEST(CmdRun, MixedClientMatchesOracle) {
  testutil::TempDir tmp;
  const auto r = cmd_run(testutil::mock_run_config(ClientKind::MockMixed, 4, {1, 2, 4}), tmp / "run");
  // Per row: sample 0 is the reference (e = 1), 1 the baseline (e = 0), 2 and 3 fail.
  const std::vector<double> e{1.0, 0.0, 0.0, 0.0};
  for (int k : {1, 2, 4}) {
    EXPECT_NEAR(pass_at(r.scores, k), oracle::pass_at_k_bruteforce(4, 2, k), 1e-12);
    for (auto m : kAllMetrics) EXPECT_NEAR(*eff_at(r.scores, m, k), oracle::eff_at_k_bruteforce(e, k), 1e-12);
  }
  EXPECT_EQ(r.scores.overall.units, 15u);
  for (const auto& row : r.scores.rows) {
    EXPECT_EQ(row.outcomes.at("pass"), 2) << row.problem_id;
    EXPECT_EQ(row.outcomes.at("mismatch"), 1) << row.problem_id;
    EXPECT_EQ(row.outcomes.at("no_module_found"), 1) << row.problem_id;
  }
  for (const char* f : {"report.md", "scores.csv", "scores.json", "quadrant.csv", "report.json",
                        "distributions.csv", "run.json", "records.jsonl"}) {
    EXPECT_TRUE(fs::exists(tmp / "run" / f)) << f;
  }
}

TEST(CmdRun, GoldenOutputIsDeterministicAndResumable) {
  testutil::TempDir tmp;
  const auto cfg = testutil::mock_run_config(ClientKind::MockMixed, 4, {1, 2, 4});
  cmd_run(cfg, tmp / "a");
  cmd_run(cfg, tmp / "b");
  const auto golden = testutil::slurp(tmp / "a" / "scores.csv");
  EXPECT_EQ(golden, testutil::slurp(tmp / "b" / "scores.csv"));

  // Endpoint disappears part way through generation.
  MockChatClient flaky(suite().bundles, MockChatClient::Mode::Mixed);
  flaky.go_unreachable_after(23);
  try {
    cmd_run(cfg, tmp / "c", &flaky);
    FAIL() << "expected EndpointUnreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EndpointUnreachable);
  }
  EXPECT_FALSE(fs::exists(tmp / "c" / "scores.csv"));
  MockChatClient resumed(suite().bundles, MockChatClient::Mode::Mixed);
  cmd_run(cfg, tmp / "c", &resumed);
  EXPECT_EQ(resumed.calls(), 60 - 23);
  EXPECT_EQ(golden, testutil::slurp(tmp / "c" / "scores.csv"));

  // Torn final record plus lost tail.
  auto log = testutil::slurp(tmp / "c" / "records.jsonl");
  log.resize(log.size() * 2 / 3);
  write_text_file(tmp / "c" / "records.jsonl", log);
  cmd_run(cfg, tmp / "c");
  EXPECT_EQ(golden, testutil::slurp(tmp / "c" / "scores.csv"));
}

TEST(CmdRun, ChangedConfigIsRejected) {
  testutil::TempDir tmp;
  auto cfg = testutil::mock_run_config(ClientKind::MockMixed, 2, {1, 2});
  cmd_run(cfg, tmp / "r");
  cfg.gen.n = 3;
  try {
    cmd_run(cfg, tmp / "r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigMismatch);
  }
  // Scoring-only changes reuse the records.
  cfg.gen.n = 2;
  cfg.ks = {1};
  MockChatClient none(suite().bundles, MockChatClient::Mode::Mixed);
  cmd_run(cfg, tmp / "r", &none);
  EXPECT_EQ(none.calls(), 0);
}

TEST(CmdRun, FormulationsShapePrompts) {
  for (auto f : {Formulation::P1RewriteUnoptimized, Formulation::P2FromSpecification}) {
    testutil::TempDir tmp;
    auto cfg = testutil::mock_run_config(ClientKind::MockReferences, 1, {1});
    cfg.formulation = f;
    MockChatClient client(suite().bundles, MockChatClient::Mode::References);
    cmd_run(cfg, tmp / "r", &client);
    const auto reqs = client.requests();
    ASSERT_EQ(reqs.size(), 15u);
    for (const auto& q : reqs) {
      const auto& b = *suite().find(q.problem_id);
      EXPECT_EQ(q.formulation, f);
      EXPECT_EQ(q.user.find(b.unoptimized_src) != std::string::npos, f == Formulation::P1RewriteUnoptimized);
    }
  }
}

TEST(CmdRun, ReferenceAndBaselineClientsBracketTheScale) {
  for (auto f : {Formulation::P1RewriteUnoptimized, Formulation::P2FromSpecification}) {
    testutil::TempDir tmp;
    auto cfg = testutil::mock_run_config(ClientKind::MockReferences, 1, {1});
    cfg.formulation = f;
    const auto refs = cmd_run(cfg, tmp / "refs");
    EXPECT_DOUBLE_EQ(pass_at(refs.scores, 1), 1.0);
    for (auto m : kAllMetrics) EXPECT_DOUBLE_EQ(*eff_at(refs.scores, m, 1), 1.0);

    cfg.client = ClientKind::MockBaseline;
    const auto base = cmd_run(cfg, tmp / "base");
    EXPECT_DOUBLE_EQ(pass_at(base.scores, 1), 1.0);
    for (auto m : kAllMetrics) EXPECT_DOUBLE_EQ(*eff_at(base.scores, m, 1), 0.0);
  }
}

TEST(CmdScore, ReplaysWithoutTools) {
  testutil::TempDir tmp;
  const auto r = cmd_run(testutil::mock_run_config(ClientKind::MockMixed, 4, {1, 2, 4}), tmp / "r");
  ::setenv("EFFBENCH_MOCKSIM", "/nonexistent/mocksim", 1);
  const auto s = cmd_score(tmp / "r");
  ::unsetenv("EFFBENCH_MOCKSIM");
  EXPECT_EQ(s, r.scores);
  const auto fewer = cmd_score(tmp / "r", ScoreOptions{std::vector<int>{1}});
  EXPECT_EQ(fewer.ks, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(fewer.overall.pass[0], r.scores.overall.pass[0]);
}

TEST(CmdScore, MissingSynthRecordsNameTheProblem) {
  testutil::TempDir tmp;
  cmd_run(testutil::mock_run_config(ClientKind::MockMixed, 2, {1}), tmp / "r");
  drop_records(tmp / "r", "synth/p060_alu/");
  try {
    cmd_score(tmp / "r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteRun);
    EXPECT_EQ(e.subject().rfind("synth/p060_alu/", 0), 0u) << e.subject();
    EXPECT_NE(std::string(e.what()).find("p060_alu"), std::string::npos);
  }
}

TEST(CmdScore, ExplicitThresholdsMoveEfficiencyOnly) {
  testutil::TempDir tmp;
  const auto r = cmd_run(testutil::mock_run_config(ClientKind::MockMixed, 4, {1, 2, 4}), tmp / "r");
  // Loosen every bound to twice the baseline so the baseline sample earns credit.
  std::map<std::string, MetricVector> T;
  for (const auto& rec : RecordLog::read(tmp / "r" / "records.jsonl")) {
    for (const auto& b : suite().bundles) {
      if (rec.key == "ref/" + b.id + "/unopt") {
        const auto m = metrics_from_json(rec.payload.at("metrics"));
        T[b.id] = {*m.area * 2, *m.delay * 2, *m.power * 2};
      }
    }
  }
  ASSERT_EQ(T.size(), 5u);
  ScoreOptions o;
  o.policy = ThresholdPolicy::Explicit;
  o.thresholds = T;
  const auto s = cmd_score(tmp / "r", o);
  EXPECT_EQ(s.overall.pass, r.scores.overall.pass);
  for (auto m : kAllMetrics) EXPECT_GT(*eff_at(s, m, 1), *eff_at(r.scores, m, 1));

  ScoreOptions bad;
  bad.policy = ThresholdPolicy::Explicit;
  bad.thresholds = std::map<std::string, MetricVector>{};
  EXPECT_THROW(cmd_score(tmp / "r", bad), Error);
}

TEST(CmdScore, CorrectnessModes) {
  testutil::TempDir tmp;
  auto cfg = testutil::mock_run_config(ClientKind::MockReferences, 1, {1});
  AnnotatingClient client("// mocksynth: tool-error");
  const auto strict = cmd_run(cfg, tmp / "r", &client);
  EXPECT_DOUBLE_EQ(pass_at(strict.scores, 1), 0.0);
  EXPECT_EQ(strict.scores.rows[0].outcomes.at("synth_tool_error"), 1);
  ScoreOptions o;
  o.correctness = CorrectnessMode::SimOnly;
  const auto loose = cmd_score(tmp / "r", o);
  EXPECT_DOUBLE_EQ(pass_at(loose, 1), 1.0);
  // Correct but unmeasured: no efficiency credit.
  for (auto m : kAllMetrics) EXPECT_DOUBLE_EQ(*eff_at(loose, m, 1), 0.0);
}

TEST(CmdReport, RewritesReportFiles) {
  testutil::TempDir tmp;
  cmd_run(testutil::mock_run_config(ClientKind::MockMixed, 2, {1, 2}), tmp / "r");
  fs::remove(tmp / "r" / "report.md");
  const auto r = cmd_report(tmp / "r");
  EXPECT_TRUE(fs::exists(tmp / "r" / "report.md"));
  EXPECT_EQ(r.config.at("backend"), "mock");
  const auto md = testutil::slurp(tmp / "r" / "report.md");
  EXPECT_NE(md.find("p104_game_of_life"), std::string::npos);
}

TEST(VerifyRefs, ShippedSuitePasses) {
  testutil::TempDir tmp;
  VerifyOptions o;
  o.mocksim = testutil::mocksim_path();
  const auto tc = load_toolchains(testutil::toolchains_file());
  const auto a = cmd_verify_refs(suite(), tc, o, tmp.path());
  EXPECT_TRUE(a.ok());
  for (const auto& r : a.rows) EXPECT_FALSE(r.hard_failure()) << r.problem_id << " " << r.check << " " << r.detail;
  for (auto m : kAllMetrics) {
    ASSERT_TRUE(a.distributions.mean_reduction_pct[index_of(m)].has_value());
    EXPECT_GT(*a.distributions.mean_reduction_pct[index_of(m)], 0.0);
  }
  for (const char* f : {"audit.md", "audit.csv", "distributions.csv"}) EXPECT_TRUE(fs::exists(tmp / f)) << f;
}

TEST(VerifyRefs, ReferenceEqualToBaselineIsDegenerate) {
  testutil::TempDir tmp;
  const auto src = testutil::data_dir() / "problems" / "p017_trailing_zeros";
  const auto dst = tmp / "problems" / "p017_trailing_zeros";
  fs::create_directories(dst);
  fs::copy(src, dst, fs::copy_options::recursive);
  auto unopt = testutil::slurp(dst / "unopt.v");
  unopt.replace(unopt.find("unopt_model"), 11, "trailing_zeros");
  write_text_file(dst / "opt_area.v", unopt);
  write_text_file(tmp / "suite.yaml", "suite: degenerate\nbundles:\n  - problems/p017_trailing_zeros\n");

  VerifyOptions o;
  o.mocksim = testutil::mocksim_path();
  const auto a = cmd_verify_refs(load_suite(tmp / "suite.yaml"), load_toolchains(testutil::toolchains_file()), o,
                                 tmp / "out");
  EXPECT_FALSE(a.ok());
  bool flagged = false;
  for (const auto& r : a.rows) flagged = flagged || (r.check == "direction/area" && r.status == "degenerate");
  EXPECT_TRUE(flagged);
}

TEST(Cli, ExitCodes) {
  testutil::TempDir tmp;
  const auto suite_arg = shell_quote(testutil::suite_manifest().string());
  const auto tc_arg = "--toolchains " + shell_quote(testutil::toolchains_file().string());
  const auto mocksim = "--mocksim " + shell_quote(testutil::mocksim_path().string());
  const auto out = shell_quote((tmp / "r").string());
  EXPECT_EQ(run_cli(tc_arg + " validate --suite " + suite_arg), 0);
  EXPECT_EQ(run_cli(tc_arg + " run --suite " + suite_arg + " --out " + out +
                    " --client mock-mixed --model scripted --auth-env '' -n 2 --ks 1 2 " + mocksim),
            0);
  EXPECT_EQ(run_cli("score --run " + out + " --format csv"), 0);
  EXPECT_EQ(run_cli(tc_arg + " run --suite " + suite_arg + " --out " + out +
                    " --client mock-mixed --model scripted --auth-env '' -n 3 --ks 1 " + mocksim),
            2);
  EXPECT_EQ(run_cli("run --no-such-flag"), 2);
  drop_records(tmp / "r", "sim/");
  EXPECT_EQ(run_cli("score --run " + out), 1);
  EXPECT_EQ(run_cli(tc_arg + " verify-refs --suite " + suite_arg + " --out " +
                    shell_quote((tmp / "audit").string()) + " " + mocksim),
            0);
}
