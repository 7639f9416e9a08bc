#include <map>
#include <mutex>

#include <gtest/gtest.h>

#include "effbench/codegen.hpp"
#include "effbench/error.hpp"
#include "effbench/verilog.hpp"
#include "test_util.hpp"

using namespace effbench;

namespace {

const ProblemBundle& p17() {
  static const auto b = testutil::sample_bundle("p017_trailing_zeros");
  return b;
}

GenerationConfig cfg(int n) {
  GenerationConfig c;
  c.model_name = "scripted";
  c.n = n;
  c.auth_env = "";
  return c;
}

}  // namespace

TEST(BuildPrompt, P1EmbedsBaselineAndTarget) {
  const auto p = build_prompt(p17(), Formulation::P1RewriteUnoptimized, MetricKind::Area);
  EXPECT_NE(p.find(p17().unoptimized_src), std::string::npos);
  EXPECT_NE(p.find(p17().module_header), std::string::npos);
  EXPECT_NE(p.find("Target metric: area"), std::string::npos);
}

TEST(BuildPrompt, P2OmitsBaseline) {
  const auto p = build_prompt(p17(), Formulation::P2FromSpecification, MetricKind::Delay);
  EXPECT_EQ(p.find(p17().unoptimized_src), std::string::npos);
  EXPECT_EQ(p.find("unopt_model"), std::string::npos);
  EXPECT_NE(p.find(p17().prompt.substr(0, 40)), std::string::npos);
  EXPECT_NE(p.find("Target metric: delay"), std::string::npos);
}

TEST(BuildPrompt, DeterministicForEveryBundle) {
  for (const auto& b : load_suite(testutil::suite_manifest()).bundles) {
    for (auto f : {Formulation::P1RewriteUnoptimized, Formulation::P2FromSpecification}) {
      for (auto m : kAllMetrics) {
        const auto a = build_prompt(b, f, m);
        EXPECT_EQ(a, build_prompt(b, f, m));
        const bool has_baseline = a.find(b.unoptimized_src) != std::string::npos;
        EXPECT_EQ(has_baseline, f == Formulation::P1RewriteUnoptimized) << b.id;
      }
    }
  }
}

TEST(ExtractVerilog, SingleFencedBlock) {
  const auto raw = "Sure.\n```verilog\nmodule foo(input [31:0] din, output [5:0] dout);\n"
                   "  assign dout = 0;\nendmodule\n```\nDone.";
  const auto ex = extract_verilog(raw, p17().module_header);
  EXPECT_EQ(ex.status, ExtractionStatus::Ok);
  EXPECT_EQ(ex.src.rfind("module trailing_zeros(", 0), 0u);
  EXPECT_NE(ex.src.find("assign dout = 0;"), std::string::npos);
}

TEST(ExtractVerilog, ProseOnly) {
  const auto ex = extract_verilog("I would use a priority encoder.", p17().module_header);
  EXPECT_EQ(ex.status, ExtractionStatus::NoModuleFound);
  EXPECT_TRUE(ex.src.empty());
}

TEST(ExtractVerilog, UnfencedModule) {
  const auto ex = extract_verilog("module x(input [31:0] din, output [5:0] dout);\nendmodule\n",
                                  p17().module_header);
  EXPECT_EQ(ex.status, ExtractionStatus::Ok);
  EXPECT_NE(ex.src.find("module trailing_zeros"), std::string::npos);
}

TEST(ExtractVerilog, PrefersFencedOverProse) {
  const auto raw = "module decoy(input a);\nendmodule\n\n```\nmodule real_one(input [31:0] din, "
                   "output [5:0] dout);\nendmodule\n```\n";
  const auto ex = extract_verilog(raw, p17().module_header);
  EXPECT_EQ(ex.status, ExtractionStatus::Ok);
  EXPECT_EQ(ex.src.find("decoy"), std::string::npos);
}

TEST(ExtractVerilog, HelperPlusTopMerged) {
  const auto raw =
      "```verilog\nmodule top_impl(input [31:0] din, output [5:0] dout);\n"
      "  helper h(.x(din[0]), .y());\nendmodule\n\nmodule helper(input x, output y);\n"
      "  assign y = x;\nendmodule\n```";
  const auto ex = extract_verilog(raw, p17().module_header);
  EXPECT_EQ(ex.status, ExtractionStatus::MultipleModulesMerged);
  const auto mods = verilog::find_modules(ex.src);
  ASSERT_EQ(mods.size(), 2u);
  EXPECT_EQ(mods[0].name, "trailing_zeros");
  EXPECT_EQ(mods[1].name, "helper");
}

TEST(ExtractVerilog, OutputIsFixpoint) {
  const std::vector<std::string> raws = {
      "```verilog\nmodule foo(input [31:0] din, output [5:0] dout);\nendmodule\n```",
      "text\nmodule a(input [31:0] din, output [5:0] dout);\nendmodule\nmodule b(input x);\nendmodule\n",
      "```\n" + p17().references.area_src + "```\n"};
  for (const auto& raw : raws) {
    const auto first = extract_verilog(raw, p17().module_header);
    ASSERT_TRUE(extracted(first.status));
    const auto second = extract_verilog(first.src, p17().module_header);
    EXPECT_EQ(second.src, first.src);
    EXPECT_EQ(second.status, first.status);
  }
  const auto single = extract_verilog(raws[0], p17().module_header);
  EXPECT_EQ(extract_verilog(single.src, p17().module_header).status, ExtractionStatus::Ok);
}

TEST(GenerateSamples, CountAndIndices) {
  MockChatClient client({p17()}, MockChatClient::Mode::References);
  const auto s = generate_samples(p17(), cfg(10), Formulation::P1RewriteUnoptimized, client);
  ASSERT_EQ(s.size(), 10u);
  for (int j = 0; j < 10; ++j) {
    EXPECT_EQ(s[static_cast<std::size_t>(j)].sample_index, j);
    EXPECT_EQ(s[static_cast<std::size_t>(j)].extraction_status, ExtractionStatus::Ok);
  }
  EXPECT_EQ(client.calls(), 10);
}

TEST(GenerateSamples, FailuresKeepN) {
  MockChatClient client({p17()}, MockChatClient::Mode::References);
  client.fail_indices({3, 7});
  auto c = cfg(10);
  c.retry_limit = 2;
  const auto s = generate_samples(p17(), c, Formulation::P1RewriteUnoptimized, client);
  ASSERT_EQ(s.size(), 10u);
  int failed = 0;
  for (const auto& x : s) {
    if (x.extraction_status == ExtractionStatus::RequestFailed) {
      ++failed;
      EXPECT_FALSE(x.extracted_src.has_value());
      EXPECT_FALSE(x.error.empty());
    }
  }
  EXPECT_EQ(failed, 2);
  EXPECT_EQ(client.calls(), 8 + 2 * 3);
}

TEST(GenerateSamples, UnreachableAborts) {
  MockChatClient client({p17()}, MockChatClient::Mode::References);
  client.go_unreachable_after(2);
  try {
    generate_samples(p17(), cfg(5), Formulation::P1RewriteUnoptimized, client);
    FAIL() << "expected EndpointUnreachable";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EndpointUnreachable);
    EXPECT_TRUE(e.is_environment());
  }
}

TEST(GenerateSamples, SinkSeesRawResponsesAndCacheSkipsRequests) {
  MockChatClient client({p17()}, MockChatClient::Mode::Mixed);
  std::map<int, ChatResponse> stored;
  std::mutex mu;
  const auto sink = [&](int j, const ChatResponse& r) {
    std::lock_guard lock(mu);
    stored[j] = r;
  };
  const auto first = generate_samples(p17(), cfg(4), Formulation::P1RewriteUnoptimized, client, sink, {}, 2);
  ASSERT_EQ(stored.size(), 4u);
  EXPECT_EQ(stored[3].content, first[3].raw_response);
  EXPECT_EQ(first[3].extraction_status, ExtractionStatus::NoModuleFound);

  MockChatClient fresh({p17()}, MockChatClient::Mode::Mixed);
  const auto cache = [&](int j) -> std::optional<ChatResponse> { return stored.at(j); };
  const auto second = generate_samples(p17(), cfg(4), Formulation::P1RewriteUnoptimized, fresh, {}, cache);
  EXPECT_EQ(fresh.calls(), 0);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(second[i].extracted_src, first[i].extracted_src);
    EXPECT_EQ(second[i].extraction_status, first[i].extraction_status);
  }
}

TEST(GenerateSamples, ReproducibleWithDeterministicMock) {
  MockChatClient a({p17()}, MockChatClient::Mode::Baseline);
  MockChatClient b({p17()}, MockChatClient::Mode::Baseline);
  const auto x = generate_samples(p17(), cfg(1), Formulation::P2FromSpecification, a);
  const auto y = generate_samples(p17(), cfg(1), Formulation::P2FromSpecification, b);
  EXPECT_EQ(x[0].raw_response, y[0].raw_response);
  EXPECT_EQ(x[0].extracted_src, y[0].extracted_src);
  EXPECT_EQ(a.requests()[0].user, build_prompt(p17(), Formulation::P2FromSpecification, MetricKind::Area));
}

TEST(GenerationConfig, Validation) {
  auto c = cfg(0);
  EXPECT_THROW(c.validate(), Error);
  c = cfg(1);
  c.retry_limit = 9;
  EXPECT_THROW(c.validate(), Error);
  c.retry_limit = 8;
  EXPECT_NO_THROW(c.validate());
}
