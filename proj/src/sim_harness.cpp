#include "effbench/sim_harness.hpp"

#include <limits>

#include "effbench/error.hpp"
#include "effbench/process.hpp"
#include "effbench/verilog.hpp"

namespace effbench {

namespace fs = std::filesystem;

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Pass: return "pass";
    case SimStatus::Mismatch: return "mismatch";
    case SimStatus::Timeout: return "timeout";
    case SimStatus::CompileError: return "compile_error";
    case SimStatus::RuntimeError: return "runtime_error";
  }
  return "?";
}

SimStatus parse_sim_status(std::string_view s) {
  for (auto st : {SimStatus::Pass, SimStatus::Mismatch, SimStatus::Timeout,
                  SimStatus::CompileError, SimStatus::RuntimeError}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown simulation status '" + std::string(s) + "'");
}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

/// First "Total mismatches:" occurrence followed (after whitespace) by digits.
std::optional<std::uint64_t> find_mismatch_count(std::string_view t) {
  constexpr std::string_view key = "Total mismatches:";
  std::size_t from = 0;
  while (true) {
    const auto p = t.find(key, from);
    if (p == std::string_view::npos) return std::nullopt;
    auto i = p + key.size();
    while (i < t.size() && is_blank(t[i])) ++i;
    if (i < t.size() && t[i] >= '0' && t[i] <= '9') {
      constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
      std::uint64_t v = 0;
      for (; i < t.size() && t[i] >= '0' && t[i] <= '9'; ++i) {
        const std::uint64_t d = static_cast<std::uint64_t>(t[i] - '0');
        v = (v > (kMax - d) / 10) ? kMax : v * 10 + d;
      }
      return v;
    }
    from = p + 1;
  }
}

}  // namespace

ParsedVerdict parse_verdict(std::string_view transcript) {
  if (transcript.find(kCompileFailedMarker) != std::string_view::npos) {
    return {SimStatus::CompileError, 0};
  }
  if (transcript.find("TIMEOUT") != std::string_view::npos) return {SimStatus::Timeout, 0};
  if (const auto n = find_mismatch_count(transcript)) {
    if (*n > 0) return {SimStatus::Mismatch, *n};
    if (transcript.find("Simulation completed.") != std::string_view::npos) {
      return {SimStatus::Pass, 0};
    }
  }
  return {SimStatus::RuntimeError, 0};
}

std::vector<SimSource> compose_sim_unit(std::string_view candidate, const ProblemBundle& b) {
  const auto ports = b.header_ports();
  auto opt = verilog::rename_top(candidate, ports, "opt_model");
  if (!opt) {
    throw Error(ErrorKind::RenameFailure, "candidate for " + b.id + " has no module declaration",
                b.id);
  }
  auto unopt = verilog::rename_top(b.unoptimized_src, ports, "unopt_model");
  if (!unopt) {
    throw Error(ErrorKind::RenameFailure, "baseline of " + b.id + " has no module declaration",
                b.id);
  }
  return {{"opt_model.v", std::move(*opt)},
          {"unopt_model.v", std::move(*unopt)},
          {"testbench.v", b.testbench_src}};
}

SimVerdict run_simulation(const std::vector<SimSource>& files, const SimConfig& cfg) {
  const auto dir = make_scratch_dir(cfg.scratch_parent, "effbench-sim");
  struct Cleanup {
    fs::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ec;
      if (!keep) fs::remove_all(dir, ec);
    }
  } cleanup{dir, cfg.keep_artifacts};

  std::string sources;
  for (const auto& f : files) {
    write_text_file(dir / f.filename, f.text);
    if (!sources.empty()) sources += ' ';
    sources += shell_quote(f.filename);
  }

  auto vars = cfg.vars;
  vars["sources"] = sources;
  vars["out"] = "sim.out";
  vars["exe"] = "sim.out";

  SimVerdict v;
  if (cfg.keep_artifacts) v.artifacts_dir = dir;
  const auto t0 = std::chrono::steady_clock::now();

  const auto compile = run_shell(render_template(cfg.compile_cmd, vars), dir, cfg.wall_timeout);
  if (compile.command_not_found) {
    throw Error(ErrorKind::SimulatorNotFound,
                "simulator compile command not found: " + compile.output, cfg.compile_cmd);
  }
  if (compile.timed_out) {
    v.status = SimStatus::Timeout;
    v.transcript = compile.output + "\n[effbench] compile step exceeded wall timeout\n";
    v.duration = std::chrono::steady_clock::now() - t0;
    return v;
  }
  if (compile.exit_code != 0) {
    v.status = SimStatus::CompileError;
    v.transcript = std::string(kCompileFailedMarker) + " (exit " +
                   std::to_string(compile.exit_code) + ")\n" + compile.output;
    v.duration = std::chrono::steady_clock::now() - t0;
    return v;
  }

  const auto remaining = cfg.wall_timeout - (std::chrono::steady_clock::now() - t0);
  const auto run = run_shell(render_template(cfg.run_cmd, vars), dir,
                             std::max(std::chrono::duration<double>(remaining), std::chrono::duration<double>(0.001)));
  if (run.command_not_found) {
    throw Error(ErrorKind::SimulatorNotFound, "simulator run command not found: " + run.output,
                cfg.run_cmd);
  }
  v.transcript = compile.output + run.output;
  v.duration = std::chrono::steady_clock::now() - t0;
  if (run.timed_out) {
    v.status = SimStatus::Timeout;
    v.transcript += "\n[effbench] simulation exceeded wall timeout\n";
    return v;
  }
  const auto parsed = parse_verdict(run.output);
  v.status = parsed.status;
  v.mismatches = parsed.mismatches;
  return v;
}

}  // namespace effbench
