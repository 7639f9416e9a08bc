#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "effbench/error.hpp"
#include "effbench/process.hpp"
#include "effbench/synth_harness.hpp"
#include "effbench/toolchain_config.hpp"
#include "effbench/verilog.hpp"
#include "test_util.hpp"

using namespace effbench;
namespace fs = std::filesystem;

namespace {

const ProblemBundle& p17() {
  static const auto b = testutil::sample_bundle("p017_trailing_zeros");
  return b;
}

SynthOptions opts_for(const ProblemBundle& b) {
  SynthOptions o;
  o.top = b.dut_name();
  o.header_ports = b.header_ports();
  return o;
}

const std::string kInverter = "module inv(input a, output y);\n  assign y = ~a;\nendmodule\n";

// External backend built from plain shell commands, standing in for a real flow.
SynthBackend shell_backend() {
  SynthBackend b;
  b.name = "shell";
  b.kind = BackendKind::External;
  b.strategies = {{"s", {"strash", "map"}, ObjectiveHint::Balanced}};
  b.script_files["flow.sh"] =
      "grep -q 'BROKEN' {src} && { echo 'ERROR: syntax error near BROKEN' > tool.log; exit 1; }\n"
      "grep -q 'CRASH' {src} && exit 3\n"
      "echo 'Chip area for module top: 1234.5' > area.rpt\n"
      "printf '  2.34  data arrival time\\n' > sta.rpt\n"
      "echo 'Total 1.2e-03 4.4e-04 5.6e-04 ignored' >> sta.rpt\n"
      "echo '{strategy_lines}' > strategy.txt\n";
  b.commands = {"sh flow.sh"};
  b.parsers[0] = ReportParser{"area.rpt", R"(Chip area for module \S+:\s*([0-9.eE+-]+))", 1, 1.0};
  b.parsers[1] = ReportParser{"sta.rpt", R"(([0-9.eE+-]+)\s+data arrival time)", 1, 1.0};
  b.parsers[2] = ReportParser{"sta.rpt", R"(^Total\s+\S+\s+\S+\s+([0-9.eE+-]+))", 1, 1000.0};
  b.unsynthesizable_patterns = {"syntax error"};
  b.timeout = std::chrono::seconds(30);
  return b;
}

}  // namespace

TEST(ExtractMetric, FirstMatchScaled) {
  const ReportParser spec{"r", R"(value:\s*([0-9.eE+-]+))", 1, 2.0};
  EXPECT_DOUBLE_EQ(extract_metric("value: 1.5\nvalue: 9", spec), 3.0);
  EXPECT_DOUBLE_EQ(extract_metric("value: 2e-3", spec), 4e-3);
}

TEST(ExtractMetric, Missing) {
  try {
    extract_metric("nothing here", ReportParser{"r", R"(value:\s*([0-9.]+))", 1, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MetricNotFound);
  }
}

TEST(ExtractMetric, RenderRoundTripIsExact) {
  const auto mock = make_mock_backend();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mant(1.0, 10.0);
  std::uniform_int_distribution<int> ex(-12, 12);
  for (int i = 0; i < 3000; ++i) {
    const double v = mant(rng) * std::pow(10.0, ex(rng));
    for (auto m : kAllMetrics) {
      EXPECT_EQ(extract_metric(render_mock_report(m, v), *mock.parsers[index_of(m)]), v);
    }
  }
  for (double v : {0.0, 1234.5, 2.34, 0.56, 1e-300, 1.7976931348623157e308}) {
    EXPECT_EQ(extract_metric(render_mock_report(MetricKind::Area, v), *mock.parsers[0]), v);
  }
}

TEST(MockSynth, FixtureOverrideRecoveredExactly) {
  auto b = make_mock_backend();
  const auto fp = verilog::design_fingerprint(kInverter, {"a", "y"});
  b.mock.overrides[fp] = MetricVector{1234.5, 2.34, 0.56};
  SynthOptions o;
  o.top = "inv";
  o.header_ports = {"a", "y"};
  const auto out = synthesize(kInverter, b, b.strategies[0], o);
  ASSERT_EQ(out.status, SynthStatus::Ok) << out.log;
  EXPECT_EQ(out.metrics, (MetricVector{1234.5, 2.34, 0.56}));
}

TEST(MockSynth, PureFunctionOfSourceAndStrategy) {
  const auto b = make_mock_backend();
  const auto o = opts_for(p17());
  const auto x = synthesize(p17().unoptimized_src, b, b.strategies[0], o);
  const auto y = synthesize(p17().unoptimized_src, b, b.strategies[0], o);
  ASSERT_EQ(x.status, SynthStatus::Ok);
  EXPECT_EQ(x.metrics, y.metrics);
  for (auto m : kAllMetrics) EXPECT_GT(*x.metrics.get(m), 0.0);
  // Formatting and comments do not change the design.
  const auto z = synthesize("// note\n" + p17().unoptimized_src + "\n\n", b, b.strategies[0], o);
  EXPECT_EQ(x.metrics, z.metrics);
  // The mock reacts to a strategy's objective hint, not to its command text.
  StrategyScript renamed{"other", {"strash"}, ObjectiveHint::Balanced};
  EXPECT_EQ(synthesize(p17().unoptimized_src, b, renamed, o).metrics, x.metrics);
  StrategyScript area{"area", {"strash"}, ObjectiveHint::Area};
  EXPECT_NE(synthesize(p17().unoptimized_src, b, area, o).metrics, x.metrics);
}

TEST(MockSynth, HintsAndScaleShiftMetrics) {
  const auto tc = load_toolchains(testutil::toolchains_file());
  const auto& b = tc.backend("mock-lib-b");
  const auto o = opts_for(p17());
  const auto bal = synthesize(p17().references.area_src, b, *b.strategy("balanced"), o);
  const auto area = synthesize(p17().references.area_src, b, *b.strategy("abc-area"), o);
  const auto delay = synthesize(p17().references.area_src, b, *b.strategy("abc-delay"), o);
  EXPECT_LT(*area.metrics.area, *bal.metrics.area);
  EXPECT_LT(*delay.metrics.delay, *bal.metrics.delay);
  EXPECT_GT(*area.metrics.delay, *delay.metrics.delay);
  const auto a = synthesize(p17().references.area_src, tc.backend("mock"),
                            *tc.backend("mock").strategy("balanced"), o);
  EXPECT_NEAR(*bal.metrics.area, *a.metrics.area * 0.55, 1e-9);
}

TEST(MockSynth, FailuresClassified) {
  const auto b = make_mock_backend();
  const auto o = opts_for(p17());
  std::string broken = p17().unoptimized_src;
  broken.replace(broken.find("begin"), 5, "");
  EXPECT_EQ(synthesize(broken, b, b.strategies[0], o).status, SynthStatus::NotSynthesizable);
  EXPECT_EQ(synthesize("prose", b, b.strategies[0], o).status, SynthStatus::NotSynthesizable);
  std::string tool = p17().unoptimized_src;
  tool.insert(tool.rfind("endmodule"), "// mocksynth: tool-error\n");
  const auto t = synthesize(tool, b, b.strategies[0], o);
  EXPECT_EQ(t.status, SynthStatus::ToolError);
  EXPECT_EQ(t.metrics, MetricVector{});
}

TEST(MockSynth, RenamedSynthesisIgnoresModuleName) {
  const auto b = make_mock_backend();
  const auto o = opts_for(p17());
  const auto x = synthesize_renamed(p17().unoptimized_src, b, b.strategies[0], o);
  const auto y = synthesize(p17().unoptimized_src, b, b.strategies[0], o);
  EXPECT_EQ(x.metrics, y.metrics);
  EXPECT_EQ(synthesize_renamed("", b, b.strategies[0], o).status, SynthStatus::NotSynthesizable);
}

TEST(Strategies, DefaultOpenBackendHasAreaAndDelay) {
  const auto tc = load_toolchains(testutil::toolchains_file());
  const auto s = list_strategies(tc.backend("yosys-sky130"));
  ASSERT_GE(s.size(), 2u);
  bool area = false;
  bool delay = false;
  for (const auto& x : s) {
    EXPECT_FALSE(x.commands.empty());
    area = area || x.hint == ObjectiveHint::Area;
    delay = delay || x.hint == ObjectiveHint::Delay;
  }
  EXPECT_TRUE(area && delay);
  EXPECT_EQ(s, list_strategies(tc.backend("yosys-sky130")));
}

TEST(Strategies, MockHasSingleBalanced) {
  const auto s = list_strategies(make_mock_backend());
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].hint, ObjectiveHint::Balanced);
}

TEST(ExternalSynth, ParsesReportsFromToolOutput) {
  const auto b = shell_backend();
  testutil::TempDir tmp;
  SynthOptions o;
  o.top = "inv";
  o.header_ports = {"a", "y"};
  o.scratch_parent = tmp.path();
  o.keep_artifacts = true;
  const auto out = synthesize(kInverter, b, b.strategies[0], o);
  ASSERT_EQ(out.status, SynthStatus::Ok) << out.log;
  EXPECT_DOUBLE_EQ(*out.metrics.area, 1234.5);
  EXPECT_DOUBLE_EQ(*out.metrics.delay, 2.34);
  EXPECT_DOUBLE_EQ(*out.metrics.power, 0.56);
  bool found = false;
  for (const auto& e : fs::directory_iterator(tmp.path())) {
    if (fs::exists(e.path() / "strategy.txt")) {
      found = true;
      EXPECT_EQ(read_text_file(e.path() / "strategy.txt"), "strash\nmap\n");
    }
  }
  EXPECT_TRUE(found);
}

TEST(ExternalSynth, DiagnosticsDecideBlame) {
  const auto b = shell_backend();
  SynthOptions o;
  o.top = "inv";
  o.header_ports = {"a", "y"};
  EXPECT_EQ(synthesize("module inv(input a, output y); // BROKEN\nendmodule\n", b, b.strategies[0], o).status,
            SynthStatus::NotSynthesizable);
  EXPECT_EQ(synthesize("module inv(input a, output y); // CRASH\nendmodule\n", b, b.strategies[0], o).status,
            SynthStatus::ToolError);
}

TEST(ExternalSynth, MissingReportIsToolError) {
  auto b = shell_backend();
  b.parsers[0]->report_file = "absent.rpt";
  SynthOptions o;
  o.top = "inv";
  o.header_ports = {"a", "y"};
  EXPECT_EQ(synthesize(kInverter, b, b.strategies[0], o).status, SynthStatus::ToolError);
}

TEST(ExternalSynth, MissingToolIsEnvironmentError) {
  auto b = shell_backend();
  b.commands = {"effbench-no-such-synth -q"};
  SynthOptions o;
  o.top = "inv";
  try {
    synthesize(kInverter, b, b.strategies[0], o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ToolNotFound);
  }
}

TEST(Toolchains, LoadsShippedConfig) {
  const auto tc = load_toolchains(testutil::toolchains_file());
  EXPECT_EQ(tc.backend("yosys-sky130").kind, BackendKind::External);
  EXPECT_EQ(tc.backend("mock").kind, BackendKind::Mock);
  EXPECT_FALSE(tc.backend("mock").mock.overrides.empty());
  EXPECT_FALSE(tc.backend("yosys-sky130").power_assumptions.empty());
  EXPECT_EQ(tc.simulator("iverilog").name, "iverilog");
  EXPECT_THROW(tc.backend("nope"), Error);
  EXPECT_THROW(tc.simulator("nope"), Error);
}
