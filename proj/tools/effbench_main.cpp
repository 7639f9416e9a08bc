// effbench command line: run, verify-refs, score, report, ablate, validate, fingerprint.
//
// Exit codes: 0 success, 1 evaluation failures (failed audit checks, invalid
// bundles, incomplete runs, failed sweeps), 2 environment or usage errors.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "effbench/ablation.hpp"
#include "effbench/error.hpp"
#include "effbench/pipeline.hpp"
#include "effbench/process.hpp"
#include "effbench/verilog.hpp"

#ifndef EFFBENCH_DEFAULT_TOOLCHAINS
#define EFFBENCH_DEFAULT_TOOLCHAINS "toolchains.yaml"
#endif

namespace fs = std::filesystem;
using namespace effbench;

namespace {

fs::path default_toolchains() {
  if (const char* env = std::getenv("EFFBENCH_TOOLCHAINS"); env && *env) return env;
  return EFFBENCH_DEFAULT_TOOLCHAINS;
}

int exit_code_for(const Error& e) {
  if (e.is_environment()) return 2;
  switch (e.kind()) {
    case ErrorKind::IncompleteRun:
    case ErrorKind::AllCellsFailed:
    case ErrorKind::InsufficientBackends:
      return 1;
    default:
      return 2;
  }
}

TableFormat parse_format(const std::string& s) {
  if (s == "markdown" || s == "md") return TableFormat::Markdown;
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw Error(ErrorKind::InvalidConfig, "unknown format '" + s + "'");
}

struct ScoreFlags {
  std::vector<int> ks;
  std::string correctness;
  std::string policy;
  bool no_clamp = false;

  void add_to(CLI::App* app) {
    app->add_option("--ks", ks, "k values (default: those stored with the run)");
    app->add_option("--correctness", correctness, "sim+synth or sim-only");
    app->add_option("--policy", policy, "threshold policy: unoptimized_baseline or explicit");
    app->add_flag("--no-clamp", no_clamp, "do not cap efficiency scores at 1");
  }

  ScoreOptions options() const {
    ScoreOptions o;
    if (!ks.empty()) o.ks = ks;
    if (!correctness.empty()) o.correctness = parse_correctness_mode(correctness);
    if (!policy.empty()) o.policy = parse_threshold_policy(policy);
    if (no_clamp) o.clamp = false;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Efficiency-aware evaluation of generated Verilog"};
  app.require_subcommand(1);
  std::string toolchains = default_toolchains().string();
  app.add_option("--toolchains", toolchains, "toolchain configuration (YAML)");

  // run
  auto* run = app.add_subcommand("run", "generate, verify, synthesize, score and report");
  RunConfig rc;
  std::string run_dir = "runs/latest";
  std::string formulation = "P1";
  std::string client = "http";
  std::string correctness = "sim+synth";
  std::vector<std::string> targets{"area", "delay", "power"};
  bool no_clamp = false;
  std::string mocksim;
  run->add_option("--suite", rc.suite, "suite manifest")->required();
  run->add_option("--out", run_dir, "run directory (resumed when it exists)");
  run->add_option("--formulation", formulation, "P1 or P2");
  run->add_option("--client", client, "http, mock-references, mock-baseline or mock-mixed");
  run->add_option("--endpoint", rc.gen.endpoint_url, "chat-completions URL");
  run->add_option("--auth-env", rc.gen.auth_env, "variable holding the bearer token ('' for none)");
  run->add_option("--model", rc.gen.model_name, "model name sent to the endpoint");
  run->add_option("-n,--samples", rc.gen.n, "samples per problem and target metric");
  run->add_option("--temperature", rc.gen.temperature);
  run->add_option("--max-tokens", rc.gen.max_tokens);
  run->add_option("--request-timeout", rc.gen.request_timeout_s, "seconds");
  run->add_option("--retries", rc.gen.retry_limit);
  run->add_option("--targets", targets, "target metrics");
  run->add_option("--backend", rc.backend);
  run->add_option("--strategy", rc.strategy);
  run->add_option("--simulator", rc.simulator);
  run->add_option("--ks", rc.ks, "k values");
  run->add_option("--correctness", correctness, "sim+synth or sim-only");
  run->add_flag("--no-clamp", no_clamp, "do not cap efficiency scores at 1");
  run->add_option("-j,--workers", rc.workers);
  run->add_flag("--keep-artifacts", rc.keep_artifacts);
  run->add_option("--scratch", rc.scratch_parent, "parent of scratch directories");
  run->add_option("--mocksim", mocksim, "mock simulator executable");

  // verify-refs
  auto* verify = app.add_subcommand("verify-refs", "audit the reference designs of a suite");
  std::string verify_suite;
  std::string verify_out = "audit";
  VerifyOptions vo;
  std::string verify_mocksim;
  verify->add_option("--suite", verify_suite)->required();
  verify->add_option("--out", verify_out, "output directory");
  verify->add_option("--backend", vo.backend);
  verify->add_option("--strategy", vo.strategy);
  verify->add_option("--simulator", vo.simulator);
  verify->add_option("-j,--workers", vo.workers);
  verify->add_flag("--keep-artifacts", vo.keep_artifacts);
  verify->add_option("--mocksim", verify_mocksim);

  // score / report
  auto* score = app.add_subcommand("score", "recompute scores from a run's records");
  std::string score_dir;
  std::string score_format = "markdown";
  ScoreFlags score_flags;
  score->add_option("--run", score_dir, "run directory")->required();
  score->add_option("--format", score_format, "markdown, csv or json");
  score_flags.add_to(score);

  auto* report = app.add_subcommand("report", "rewrite a run's report files from its records");
  std::string report_dir;
  ScoreFlags report_flags;
  report->add_option("--run", report_dir, "run directory")->required();
  report_flags.add_to(report);

  // ablate
  auto* ablate = app.add_subcommand("ablate", "synthesis sweep over backends and strategies");
  std::string plan_file;
  std::string ablate_out = "sweep";
  SweepOptions so;
  ablate->add_option("--plan", plan_file, "sweep plan (YAML)")->required();
  ablate->add_option("--out", ablate_out, "output directory (resumed when it exists)");
  ablate->add_option("-j,--workers", so.workers);
  ablate->add_flag("--keep-artifacts", so.keep_artifacts);

  // validate / fingerprint
  auto* validate = app.add_subcommand("validate", "check bundle invariants");
  std::string validate_suite;
  validate->add_option("--suite", validate_suite)->required();

  auto* fingerprint = app.add_subcommand("fingerprint", "print design fingerprints of a suite");
  std::string fp_suite;
  fingerprint->add_option("--suite", fp_suite)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      rc.toolchains = toolchains;
      rc.formulation = parse_formulation(formulation);
      rc.client = parse_client_kind(client);
      rc.correctness = parse_correctness_mode(correctness);
      rc.clamp = !no_clamp;
      rc.mocksim = mocksim;
      rc.targets.clear();
      for (const auto& t : targets) rc.targets.push_back(parse_metric_kind(t));
      const auto r = cmd_run(rc, run_dir, nullptr,
                             [](const std::string& s) { std::cerr << "[effbench] " << s << '\n'; });
      std::cout << emit_score_table(r.scores, TableFormat::Markdown);
      std::cout << "report written to " << run_dir << '\n';
      return 0;
    }
    if (*verify) {
      vo.mocksim = verify_mocksim;
      const auto res = cmd_verify_refs(load_suite(verify_suite), load_toolchains(toolchains), vo,
                                       verify_out);
      for (const auto& row : res.rows) {
        if (row.status != "pass") {
          std::cout << row.problem_id << ' ' << row.check << ' ' << row.status << ": " << row.detail
                    << '\n';
        }
      }
      std::cout << (res.ok() ? "audit passed" : "audit FAILED") << " (" << verify_out
                << "/audit.md)\n";
      return res.ok() ? 0 : 1;
    }
    if (*score) {
      const auto scores = cmd_score(score_dir, score_flags.options());
      std::cout << emit_score_table(scores, parse_format(score_format));
      return 0;
    }
    if (*report) {
      cmd_report(report_dir, report_flags.options());
      std::cout << "report written to " << report_dir << '\n';
      return 0;
    }
    if (*ablate) {
      const auto tc = load_toolchains(toolchains);
      const auto plan = load_sweep_plan(plan_file, tc);
      const auto hash = config_hash(nlohmann::json(read_text_file(plan_file)));
      fs::create_directories(ablate_out);
      RecordLog log(fs::path(ablate_out) / "sweep.jsonl", hash);
      so.on_plan = [](std::size_t total, std::size_t done) {
        std::cerr << "[effbench] sweep: " << total << " jobs, " << done << " already done\n";
      };
      const auto res = run_sweep(plan, log, so);
      write_sweep_outputs(res, ablate_out);
      std::size_t failed = 0;
      for (const auto& r : res.records) failed += r.status != SynthStatus::Ok;
      std::cout << res.records.size() << " cells, " << failed << " failed; outputs in "
                << ablate_out << '\n';
      return 0;
    }
    if (*validate) {
      const auto suite = load_suite(validate_suite);
      bool ok = true;
      for (const auto& b : suite.bundles) {
        const auto vr = validate_bundle(b);
        ok = ok && vr.ok();
        std::cout << b.id << ": " << (vr.ok() ? "ok" : "INVALID") << '\n';
        for (const auto& c : vr.checks) {
          if (!c.passed) std::cout << "  " << c.name << ": " << c.detail << '\n';
        }
      }
      return ok ? 0 : 1;
    }
    if (*fingerprint) {
      const auto suite = load_suite(fp_suite);
      for (const auto& b : suite.bundles) {
        for (auto r : {DesignRole::Unopt, DesignRole::OptArea, DesignRole::OptDelay,
                       DesignRole::OptPower}) {
          std::cout << b.id << ' ' << to_string(r) << ' '
                    << verilog::design_fingerprint(b.design(r), b.header_ports()) << '\n';
        }
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "effbench: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "effbench: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
