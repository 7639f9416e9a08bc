#include <gtest/gtest.h>

#include "effbench/ablation.hpp"
#include "effbench/error.hpp"
#include "effbench/process.hpp"
#include "test_util.hpp"

using namespace effbench;
namespace fs = std::filesystem;

namespace {

const Toolchains& tc() {
  static const auto t = load_toolchains(testutil::toolchains_file());
  return t;
}

SweepPlan single_plan() {
  SweepPlan p;
  p.backends = {tc().backend("mock")};
  p.problems = {testutil::sample_bundle("p017_trailing_zeros")};
  p.designs = {DesignRole::Unopt, DesignRole::OptArea, DesignRole::OptDelay, DesignRole::OptPower};
  return p;
}

SweepResult sweep(const SweepPlan& plan, const fs::path& log_path) {
  RecordLog log(log_path, "h");
  return run_sweep(plan, log, SweepOptions{});
}

SweepRecord rec(std::string backend, std::string problem, DesignRole d, MetricVector m,
                std::string strategy = "balanced") {
  SweepRecord r;
  r.backend = std::move(backend);
  r.problem_id = std::move(problem);
  r.design = d;
  r.strategy = std::move(strategy);
  r.status = SynthStatus::Ok;
  r.metrics = m;
  return r;
}

}  // namespace

TEST(Sweep, OneBackendOneProblem) {
  testutil::TempDir tmp;
  const auto r = sweep(single_plan(), tmp / "sweep.jsonl");
  EXPECT_EQ(r.total_jobs, 4u);
  EXPECT_EQ(r.executed, 4u);
  ASSERT_EQ(r.records.size(), 4u);
  for (const auto& x : r.records) {
    EXPECT_EQ(x.status, SynthStatus::Ok);
    for (auto m : kAllMetrics) {
      ASSERT_TRUE(x.e[index_of(m)].has_value()) << x.key();
      EXPECT_GE(*x.e[index_of(m)], 0.0);
      EXPECT_LE(*x.e[index_of(m)], 1.0);
    }
  }
  // The baseline itself scores 0, each metric's reference scores 1.
  for (const auto& x : r.records) {
    if (x.design == DesignRole::Unopt) {
      for (auto m : kAllMetrics) EXPECT_DOUBLE_EQ(*x.e[index_of(m)], 0.0);
    }
    if (x.design == DesignRole::OptArea) EXPECT_DOUBLE_EQ(*x.e[0], 1.0);
    if (x.design == DesignRole::OptDelay) EXPECT_DOUBLE_EQ(*x.e[1], 1.0);
  }
}

TEST(Sweep, ResumeAfterInterruptionMatches) {
  testutil::TempDir tmp;
  const auto full = sweep(single_plan(), tmp / "a.jsonl");

  // Interrupted: only two designs ran, and the last line was cut mid-write.
  auto partial = single_plan();
  partial.designs = {DesignRole::Unopt, DesignRole::OptArea};
  sweep(partial, tmp / "b.jsonl");
  {
    std::ofstream out(tmp / "b.jsonl", std::ios::app);
    out << "{\"stage\":\"sweep\",\"key\":\"mock/p0";
  }
  const auto resumed = sweep(single_plan(), tmp / "b.jsonl");
  EXPECT_EQ(resumed.skipped, 2u);
  EXPECT_EQ(resumed.executed, 2u);
  EXPECT_EQ(resumed.records, full.records);

  const auto again = sweep(single_plan(), tmp / "b.jsonl");
  EXPECT_EQ(again.executed, 0u);
  EXPECT_EQ(again.records, full.records);
}

TEST(Sweep, TwoStrategiesGiveTwoParetoPoints) {
  testutil::TempDir tmp;
  SweepPlan p;
  p.backends = {tc().backend("mock-lib-b")};
  p.problems = {testutil::sample_bundle("p017_trailing_zeros")};
  p.designs = {DesignRole::Unopt};
  p.strategies = {"abc-area", "abc-delay"};
  const auto r = sweep(p, tmp / "s.jsonl");
  const auto pts = sweep_pareto(r.records);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].group, pts[1].group);
  // One strategy wins area, the other delay: neither dominates.
  EXPECT_TRUE(pts[0].non_dominated);
  EXPECT_TRUE(pts[1].non_dominated);
}

TEST(Sweep, UnknownStrategyRejected) {
  auto p = single_plan();
  p.strategies = {"no-such"};
  EXPECT_THROW(p.total_jobs(), Error);
}

TEST(Sweep, AllCellsFailed) {
  testutil::TempDir tmp;
  auto p = single_plan();
  for (auto* s : {&p.problems[0].unoptimized_src, &p.problems[0].references.area_src,
                  &p.problems[0].references.delay_src, &p.problems[0].references.power_src}) {
    s->insert(s->rfind("endmodule"), "// mocksynth: tool-error\n");
  }
  try {
    sweep(p, tmp / "f.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AllCellsFailed);
  }
  // Failed cells are still on record.
  EXPECT_EQ(RecordLog::read(tmp / "f.jsonl").size(), 4u);
}

TEST(Sweep, PartialFailureContinues) {
  testutil::TempDir tmp;
  auto p = single_plan();
  auto& s = p.problems[0].references.power_src;
  s.insert(s.rfind("endmodule"), "// mocksynth: tool-error\n");
  const auto r = sweep(p, tmp / "g.jsonl");
  ASSERT_EQ(r.records.size(), 4u);
  int failed = 0;
  for (const auto& x : r.records) failed += x.status == SynthStatus::ToolError;
  EXPECT_EQ(failed, 1);
}

TEST(Sweep, RecordJsonRoundTrip) {
  auto r = rec("mock", "p", DesignRole::OptDelay, {1.0, 2.0, std::nullopt}, "s");
  r.error = "x";
  EXPECT_EQ(SweepRecord::from_json(r.to_json()), r);
  EXPECT_EQ(r.key(), "mock/p/opt_delay/s");
}

TEST(DeriveEfficiency, FallsBackToBestSweptDesign) {
  std::vector<SweepRecord> rs = {rec("b", "p", DesignRole::Unopt, {10.0, 10.0, 10.0}),
                                 rec("b", "p", DesignRole::OptDelay, {8.0, 5.0, 9.0})};
  derive_efficiency(rs);
  // No area reference swept: R is the best area seen (8).
  EXPECT_DOUBLE_EQ(*rs[1].e[0], 1.0);
  EXPECT_DOUBLE_EQ(*rs[1].e[1], 1.0);
  EXPECT_DOUBLE_EQ(*rs[0].e[0], 0.0);
}

TEST(DeriveEfficiency, DegenerateIsAbsent) {
  std::vector<SweepRecord> rs = {rec("b", "p", DesignRole::Unopt, {10.0, 10.0, 10.0}),
                                 rec("b", "p", DesignRole::OptArea, {10.0, 12.0, 10.0})};
  derive_efficiency(rs);
  EXPECT_FALSE(rs[1].e[0].has_value());
  EXPECT_FALSE(rs[0].e[1].has_value());
}

TEST(Consistency, IdenticalBackendsHaveZeroSpread) {
  BackendEfficiency be;
  be["a"]["p"] = {0.5, 0.4, 0.3};
  be["b"]["p"] = {0.5, 0.4, 0.3};
  const auto rows = consistency_score(be);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.spread, 0.0);
    EXPECT_TRUE(r.sign_agreement);
  }
}

TEST(Consistency, SpreadAndSign) {
  BackendEfficiency be;
  be["a"]["p"] = {0.6, 0.3, std::nullopt};
  be["b"]["p"] = {0.7, 0.0, std::nullopt};
  const auto rows = consistency_score(be);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].spread, 0.1, 1e-12);
  EXPECT_TRUE(rows[0].sign_agreement);
  EXPECT_NEAR(rows[1].spread, 0.3, 1e-12);
  EXPECT_FALSE(rows[1].sign_agreement);
  EXPECT_NE(emit_consistency_csv(rows).find("p,delay"), std::string::npos);
}

TEST(Consistency, SingleBackendInsufficient) {
  BackendEfficiency be;
  be["a"]["p"] = {0.6, 0.3, 0.1};
  try {
    consistency_score(be);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientBackends);
  }
}

TEST(SweepPlanFile, ShippedPlanLoads) {
  const auto plan = load_sweep_plan(testutil::data_dir() / "sweeps" / "samples_mock.yaml", tc());
  EXPECT_EQ(plan.backends.size(), 2u);
  EXPECT_EQ(plan.problems.size(), 3u);
  EXPECT_EQ(plan.designs.size(), 4u);
  EXPECT_EQ(plan.total_jobs(), 3u * 4u * (1u + 3u));
}

TEST(SweepOutputs, CrossBackendSweepWritesConsistency) {
  testutil::TempDir tmp;
  auto plan = single_plan();
  plan.backends.push_back(tc().backend("mock-lib-b"));
  const auto r = sweep(plan, tmp / "x.jsonl");
  write_sweep_outputs(r, tmp.path());
  for (const char* f : {"sweep.csv", "pareto.csv", "consistency.csv"}) EXPECT_TRUE(fs::exists(tmp / f)) << f;
  const auto rows = consistency_score(reference_efficiency(r.records));
  for (const auto& row : rows) EXPECT_TRUE(row.sign_agreement) << row.problem_id;
}
