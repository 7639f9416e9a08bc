#include "effbench/synth_harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <regex>

#include "effbench/error.hpp"
#include "effbench/process.hpp"
#include "effbench/verilog.hpp"

namespace effbench {

namespace fs = std::filesystem;

std::string_view to_string(ObjectiveHint h) {
  switch (h) {
    case ObjectiveHint::Area: return "area";
    case ObjectiveHint::Delay: return "delay";
    case ObjectiveHint::Balanced: return "balanced";
  }
  return "?";
}

ObjectiveHint parse_objective_hint(std::string_view s) {
  for (auto h : {ObjectiveHint::Area, ObjectiveHint::Delay, ObjectiveHint::Balanced}) {
    if (to_string(h) == s) return h;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown objective hint '" + std::string(s) + "'");
}

std::string_view to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::Ok: return "ok";
    case SynthStatus::NotSynthesizable: return "not_synthesizable";
    case SynthStatus::ToolError: return "tool_error";
  }
  return "?";
}

SynthStatus parse_synth_status(std::string_view s) {
  for (auto st : {SynthStatus::Ok, SynthStatus::NotSynthesizable, SynthStatus::ToolError}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown synthesis status '" + std::string(s) + "'");
}

const StrategyScript* SynthBackend::strategy(std::string_view n) const {
  for (const auto& s : strategies) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

double extract_metric(std::string_view report, const ReportParser& spec) {
  std::regex re;
  try {
    re = std::regex(spec.pattern, std::regex::ECMAScript | std::regex::multiline);
  } catch (const std::regex_error& e) {
    throw Error(ErrorKind::InvalidConfig, "bad report pattern '" + spec.pattern + "': " + e.what());
  }
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(report.begin(), report.end(), m, re) ||
      spec.group >= static_cast<int>(m.size()) || !m[spec.group].matched) {
    throw Error(ErrorKind::MetricNotFound,
                "pattern '" + spec.pattern + "' not found in " + spec.report_file, spec.report_file);
  }
  const auto text = m[spec.group].str();
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::MetricNotFound,
                "'" + text + "' in " + spec.report_file + " is not a number", spec.report_file);
  }
  return v * spec.scale;
}

std::vector<StrategyScript> list_strategies(const SynthBackend& backend) {
  return backend.strategies;
}

namespace {

constexpr double kAreaLo = 50.0;
constexpr double kDelayLo = 0.5;
constexpr double kPowerLo = 0.01;

std::string fmt_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ReportParser mock_parser(MetricKind m) {
  constexpr const char* num = R"(([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?|inf|nan))";
  switch (m) {
    case MetricKind::Area:
      return {"area.rpt", std::string(R"(Chip area for module '[^']*':\s*)") + num, 1, 1.0};
    case MetricKind::Delay:
      return {"delay.rpt", std::string(num) + R"(\s+data arrival time)", 1, 1.0};
    case MetricKind::Power:
      return {"power.rpt", std::string(R"(Total power \(mW\):\s*)") + num, 1, 1.0};
  }
  return {};
}

std::string strategy_directive(std::string_view src) {
  const auto p = src.find("mocksynth:");
  if (p == std::string_view::npos) return {};
  auto e = src.find('\n', p);
  if (e == std::string_view::npos) e = src.size();
  std::string d(src.substr(p + 10, e - p - 10));
  const auto b = d.find_first_not_of(" \t");
  const auto l = d.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : d.substr(b, l - b + 1);
}

SynthOutcome synthesize_mock(std::string_view src, const SynthBackend& backend,
                             const StrategyScript& strategy, const SynthOptions& opts) {
  SynthOutcome out;
  std::string diag;
  if (verilog::find_modules(src).empty()) {
    out.status = SynthStatus::NotSynthesizable;
    out.log = "mock-synth: no module found\n";
    return out;
  }
  if (!verilog::structurally_balanced(src, &diag)) {
    out.status = SynthStatus::NotSynthesizable;
    out.log = "mock-synth: syntax error: " + diag + "\n";
    return out;
  }
  if (strategy_directive(src) == "tool-error") {
    out.status = SynthStatus::ToolError;
    out.log = "mock-synth: injected tool failure\n";
    return out;
  }

  const auto metrics = mock_metrics(src, backend, strategy, opts.header_ports);
  std::map<std::string, std::string> reports;
  for (auto m : kAllMetrics) {
    if (!backend.supports(m)) continue;
    reports[backend.parsers[index_of(m)]->report_file] += render_mock_report(m, *metrics.get(m));
  }

  if (opts.keep_artifacts) {
    const auto dir = make_scratch_dir(opts.scratch_parent, "effbench-synth");
    write_text_file(dir / "design.v", src);
    for (const auto& [file, text] : reports) write_text_file(dir / file, text);
    out.log = "mock-synth: artifacts in " + dir.string() + "\n";
  }

  for (auto m : kAllMetrics) {
    if (!backend.supports(m)) continue;
    const auto& spec = *backend.parsers[index_of(m)];
    try {
      out.metrics.set(m, extract_metric(reports[spec.report_file], spec));
    } catch (const Error& e) {
      out.status = SynthStatus::ToolError;
      out.log += e.what();
      out.metrics = {};
      return out;
    }
  }
  out.log += "mock-synth: strategy " + strategy.name + "\n";
  out.status = SynthStatus::Ok;
  return out;
}

bool any_match(const std::vector<std::string>& patterns, const std::string& text) {
  for (const auto& p : patterns) {
    try {
      if (std::regex_search(text, std::regex(p, std::regex::ECMAScript | std::regex::multiline))) {
        return true;
      }
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::InvalidConfig, "bad unsynthesizable pattern '" + p + "': " + e.what());
    }
  }
  return false;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

SynthOutcome synthesize_external(std::string_view src, const SynthBackend& backend,
                                 const StrategyScript& strategy, const SynthOptions& opts) {
  const auto dir = fs::absolute(make_scratch_dir(opts.scratch_parent, "effbench-synth"));
  struct Cleanup {
    fs::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ec;
      if (!keep) fs::remove_all(dir, ec);
    }
  } cleanup{dir, opts.keep_artifacts};

  write_text_file(dir / "design.v", src);
  char period[32];
  std::snprintf(period, sizeof period, "%g", backend.clock_period);
  const std::map<std::string, std::string> vars{
      {"src", (dir / "design.v").string()},
      {"top", opts.top},
      {"liberty", backend.liberty},
      {"report_dir", dir.string()},
      {"strategy_cmds", join(strategy.commands, "; ")},
      {"strategy_lines", join(strategy.commands, "\n")},
      {"clock_period", period},
  };
  for (const auto& [file, tmpl] : backend.script_files) {
    write_text_file(dir / file, render_template(tmpl, vars));
  }

  SynthOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& tmpl : backend.commands) {
    const auto cmd = render_template(tmpl, vars);
    const auto remaining = backend.timeout - (std::chrono::steady_clock::now() - t0);
    const auto r = run_shell(cmd, dir, std::max(std::chrono::duration<double>(remaining), std::chrono::duration<double>(0.001)));
    out.log += "$ " + cmd + "\n" + r.output;
    if (r.command_not_found) {
      throw Error(ErrorKind::ToolNotFound, "synthesis tool not found: " + r.output, backend.name);
    }
    if (r.timed_out) {
      out.status = SynthStatus::ToolError;
      out.log += "[effbench] synthesis exceeded timeout\n";
      return out;
    }
    if (r.exit_code != 0) {
      std::string evidence = r.output;
      std::error_code ec;
      for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".log") evidence += read_text_file(entry.path());
      }
      out.status = any_match(backend.unsynthesizable_patterns, evidence)
                       ? SynthStatus::NotSynthesizable
                       : SynthStatus::ToolError;
      out.log += evidence.substr(r.output.size());
      return out;
    }
  }

  for (auto m : kAllMetrics) {
    if (!backend.supports(m)) continue;
    const auto& spec = *backend.parsers[index_of(m)];
    try {
      const auto v = extract_metric(read_text_file(dir / spec.report_file), spec);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorKind::MetricNotFound, "implausible " + std::string(to_string(m)) +
                                                   " value " + fmt_exact(v));
      }
      out.metrics.set(m, v);
    } catch (const Error& e) {
      out.status = SynthStatus::ToolError;
      out.metrics = {};
      out.log += std::string("[effbench] ") + e.what() + "\n";
      return out;
    }
  }
  if (opts.keep_artifacts && fs::exists(dir / "netlist.v")) out.netlist_path = dir / "netlist.v";
  out.status = SynthStatus::Ok;
  return out;
}

}  // namespace

std::string render_mock_report(MetricKind metric, double value) {
  switch (metric) {
    case MetricKind::Area:
      return "=== top ===\n   Number of cells: 1\n   Chip area for module '\\top': " +
             fmt_exact(value) + "\n";
    case MetricKind::Delay:
      return "Startpoint: in\nEndpoint: out\n  " + fmt_exact(value) + "   data arrival time\n";
    case MetricKind::Power:
      return "Group  Internal  Switching  Leakage\nTotal power (mW): " + fmt_exact(value) + "\n";
  }
  return {};
}

MetricVector mock_metrics(std::string_view src, const SynthBackend& backend,
                          const StrategyScript& strategy,
                          const std::vector<std::string>& header_ports) {
  const auto canon = verilog::canonical_form(src, header_ports);
  const auto fp = verilog::design_fingerprint(src, header_ports);
  const auto ov = backend.mock.overrides.find(fp);

  MetricVector mv;
  for (auto m : kAllMetrics) {
    std::optional<double> base;
    if (ov != backend.mock.overrides.end()) base = ov->second.get(m);
    if (!base) {
      const auto h = verilog::fnv1a64(backend.mock.key + "|" + std::string(to_string(m)) + "|" +
                                      canon);
      switch (m) {
        case MetricKind::Area: base = kAreaLo + static_cast<double>(h % 1000000) / 100.0; break;
        case MetricKind::Delay: base = kDelayLo + static_cast<double>(h % 10000) / 1000.0; break;
        case MetricKind::Power: base = kPowerLo + static_cast<double>(h % 100000) / 100000.0; break;
      }
    }
    double v = *base;
    if (strategy.hint == ObjectiveHint::Area) {
      if (m == MetricKind::Area) v *= 0.95;
      if (m == MetricKind::Delay) v *= 1.10;
    } else if (strategy.hint == ObjectiveHint::Delay) {
      if (m == MetricKind::Area) v *= 1.10;
      if (m == MetricKind::Delay) v *= 0.90;
    }
    mv.set(m, v * backend.mock.scale[index_of(m)]);
  }
  return mv;
}

SynthBackend make_mock_backend(std::string name, std::string key) {
  SynthBackend b;
  b.name = std::move(name);
  b.kind = BackendKind::Mock;
  b.mock.key = std::move(key);
  b.strategies = {{"balanced", {"strash", "dch", "map", "topo", "stime -p"}, ObjectiveHint::Balanced}};
  for (auto m : kAllMetrics) b.parsers[index_of(m)] = mock_parser(m);
  b.timeout = std::chrono::seconds(30);
  b.power_assumptions = "synthetic";
  return b;
}

SynthOutcome synthesize(std::string_view src, const SynthBackend& backend,
                        const StrategyScript& strategy, const SynthOptions& opts) {
  if (backend.kind == BackendKind::Mock) return synthesize_mock(src, backend, strategy, opts);
  return synthesize_external(src, backend, strategy, opts);
}

SynthOutcome synthesize_renamed(std::string_view src, const SynthBackend& backend,
                                const StrategyScript& strategy, const SynthOptions& opts) {
  auto renamed = verilog::rename_top(src, opts.header_ports, opts.top);
  if (!renamed) {
    SynthOutcome out;
    out.status = SynthStatus::NotSynthesizable;
    out.log = "no module found";
    return out;
  }
  return synthesize(*renamed, backend, strategy, opts);
}

}  // namespace effbench
