#include "effbench/toolchain_config.hpp"

#include <yaml-cpp/yaml.h>

#include "effbench/error.hpp"
#include "effbench/process.hpp"

namespace effbench {

namespace fs = std::filesystem;

SimConfig SimulatorProfile::to_sim_config(const std::map<std::string, std::string>& vars) const {
  SimConfig c;
  c.compile_cmd = compile_cmd;
  c.run_cmd = run_cmd;
  c.vars = vars;
  c.wall_timeout = std::chrono::duration<double>(timeout_s);
  return c;
}

namespace {

template <typename Map>
std::string names_of(const Map& m) {
  std::string out;
  for (const auto& [k, v] : m) out += (out.empty() ? "" : ", ") + k;
  return out.empty() ? "none" : out;
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, where + ": " + what, where);
}

std::string req_string(const YAML::Node& n, const char* key, const std::string& where) {
  if (!n[key] || !n[key].IsScalar()) bad(where, std::string("missing '") + key + "'");
  return n[key].as<std::string>();
}

MetricVector read_vector(const YAML::Node& n, const std::string& where) {
  MetricVector v;
  if (!n.IsMap()) bad(where, "expected a map of area/delay/power");
  for (const auto& kv : n) {
    const auto m = parse_metric_kind(kv.first.as<std::string>());
    try {
      v.set(m, kv.second.as<double>());
    } catch (const YAML::Exception&) {
      bad(where, "non-numeric " + kv.first.as<std::string>());
    }
  }
  return v;
}

ReportParser read_parser(const YAML::Node& n, const std::string& where) {
  ReportParser p;
  p.report_file = req_string(n, "file", where);
  p.pattern = req_string(n, "pattern", where);
  if (n["group"]) p.group = n["group"].as<int>();
  if (n["scale"]) p.scale = n["scale"].as<double>();
  return p;
}

}  // namespace

const SimulatorProfile& Toolchains::simulator(const std::string& name) const {
  const auto it = simulators.find(name);
  if (it == simulators.end()) {
    throw Error(ErrorKind::InvalidConfig,
                "unknown simulator '" + name + "' (available: " + names_of(simulators) + ")", name);
  }
  return it->second;
}

const SynthBackend& Toolchains::backend(const std::string& name) const {
  const auto it = backends.find(name);
  if (it == backends.end()) {
    throw Error(ErrorKind::InvalidConfig,
                "unknown backend '" + name + "' (available: " + names_of(backends) + ")", name);
  }
  return it->second;
}

std::map<std::string, MetricVector> load_metric_overrides(const fs::path& file) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::InvalidConfig, file.string() + ": " + e.what(), file.string());
  }
  std::map<std::string, MetricVector> out;
  if (!root || root.IsNull()) return out;
  if (!root.IsMap()) bad(file.string(), "expected a map of fingerprints");
  for (const auto& kv : root) {
    const auto fp = kv.first.as<std::string>();
    out[fp] = read_vector(kv.second, file.string() + ":" + fp);
  }
  return out;
}

Toolchains load_toolchains(const fs::path& file) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::InvalidConfig, file.string() + ": " + e.what(), file.string());
  }
  const auto base = file.parent_path();
  Toolchains tc;

  try {
    for (const auto& kv : root["simulators"]) {
      const auto name = kv.first.as<std::string>();
      const auto where = "simulators." + name;
      SimulatorProfile p;
      p.name = name;
      p.compile_cmd = req_string(kv.second, "compile", where);
      p.run_cmd = req_string(kv.second, "run", where);
      if (kv.second["timeout"]) p.timeout_s = kv.second["timeout"].as<double>();
      tc.simulators[name] = p;
    }

    for (const auto& kv : root["strategies"]) {
      const auto name = kv.first.as<std::string>();
      const auto where = "strategies." + name;
      StrategyScript s;
      s.name = name;
      s.hint = parse_objective_hint(kv.second["hint"] ? kv.second["hint"].as<std::string>()
                                                      : "balanced");
      for (const auto& c : kv.second["commands"]) s.commands.push_back(c.as<std::string>());
      if (s.commands.empty()) bad(where, "empty command sequence");
      tc.strategies[name] = s;
    }

    for (const auto& kv : root["backends"]) {
      const auto name = kv.first.as<std::string>();
      const auto where = "backends." + name;
      const auto& n = kv.second;
      const auto kind = req_string(n, "kind", where);
      SynthBackend b;
      if (kind == "mock") {
        b = make_mock_backend(name, n["key"] ? n["key"].as<std::string>() : name);
        if (n["scale"]) {
          const auto s = read_vector(n["scale"], where + ".scale");
          for (auto m : kAllMetrics) {
            if (s.get(m)) b.mock.scale[index_of(m)] = *s.get(m);
          }
        }
        if (n["overrides"]) {
          b.mock.overrides = load_metric_overrides(base / n["overrides"].as<std::string>());
        }
      } else if (kind == "external") {
        b.name = name;
        b.kind = BackendKind::External;
        for (const auto& f : n["files"]) {
          b.script_files[f.first.as<std::string>()] = f.second.as<std::string>();
        }
        for (const auto& c : n["commands"]) b.commands.push_back(c.as<std::string>());
        if (b.commands.empty()) bad(where, "no commands");
        for (const auto& r : n["reports"]) {
          const auto m = parse_metric_kind(r.first.as<std::string>());
          b.parsers[index_of(m)] = read_parser(r.second, where + ".reports");
        }
        for (const auto& p : n["unsynthesizable"]) {
          b.unsynthesizable_patterns.push_back(p.as<std::string>());
        }
      } else {
        bad(where, "kind must be 'mock' or 'external'");
      }
      if (n["liberty"]) b.liberty = expand_env(n["liberty"].as<std::string>());
      if (n["clock_period"]) b.clock_period = n["clock_period"].as<double>();
      if (n["timeout"]) b.timeout = std::chrono::duration<double>(n["timeout"].as<double>());
      if (n["power_assumptions"]) b.power_assumptions = n["power_assumptions"].as<std::string>();
      if (n["strategies"]) {
        b.strategies.clear();
        for (const auto& s : n["strategies"]) {
          const auto sn = s.as<std::string>();
          const auto it = tc.strategies.find(sn);
          if (it == tc.strategies.end()) bad(where, "unknown strategy '" + sn + "'");
          b.strategies.push_back(it->second);
        }
      }
      if (b.strategies.empty()) bad(where, "no strategies");
      tc.backends[name] = std::move(b);
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::InvalidConfig, file.string() + ": " + e.what(), file.string());
  }
  return tc;
}

}  // namespace effbench
