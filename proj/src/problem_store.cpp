#include "effbench/problem_store.hpp"

#include <algorithm>
#include <set>

#include <yaml-cpp/yaml.h>

#include "effbench/error.hpp"
#include "effbench/process.hpp"
#include "effbench/verilog.hpp"

namespace effbench {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kManifest = "manifest";

struct ComponentFiles {
  std::string prompt = "prompt.txt";
  std::string header = "header.v";
  std::string unoptimized = "unopt.v";
  std::string opt_area = "opt_area.v";
  std::string opt_delay = "opt_delay.v";
  std::string opt_power = "opt_power.v";
  std::string testbench = "testbench.v";
};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string read_component(const fs::path& dir, const std::string& file, const char* component) {
  const auto p = dir / file;
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw Error(ErrorKind::MissingComponent,
                std::string(component) + " file '" + file + "' not found in " + dir.string(),
                component);
  }
  auto text = read_text_file(p);
  if (blank(text)) {
    throw Error(ErrorKind::MissingComponent,
                std::string(component) + " file '" + file + "' is empty", component);
  }
  return text;
}

template <typename T>
T scalar_or(const YAML::Node& n, const char* key, T fallback) {
  if (!n[key]) return fallback;
  try {
    return n[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::MalformedManifest, std::string("field '") + key + "': " + e.what(), key);
  }
}

std::string missing_ports_detail(const std::vector<std::string>& want,
                                 const std::vector<std::string>& have) {
  std::set<std::string> w(want.begin(), want.end());
  std::set<std::string> h(have.begin(), have.end());
  std::string out;
  for (const auto& p : w) {
    if (!h.count(p)) out += (out.empty() ? "" : ", ") + ("missing '" + p + "'");
  }
  for (const auto& p : h) {
    if (!w.count(p)) out += (out.empty() ? "" : ", ") + ("extra '" + p + "'");
  }
  return out;
}

}  // namespace

const std::string& ReferenceSet::source(MetricKind m) const {
  switch (m) {
    case MetricKind::Area: return area_src;
    case MetricKind::Delay: return delay_src;
    case MetricKind::Power: break;
  }
  return power_src;
}

const std::string& ReferenceSet::file(MetricKind m) const {
  switch (m) {
    case MetricKind::Area: return area_file;
    case MetricKind::Delay: return delay_file;
    case MetricKind::Power: break;
  }
  return power_file;
}

std::vector<std::pair<MetricKind, MetricKind>> ReferenceSet::aliases() const {
  std::vector<std::pair<MetricKind, MetricKind>> out;
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    for (std::size_t j = i + 1; j < kAllMetrics.size(); ++j) {
      if (aliased(kAllMetrics[i], kAllMetrics[j])) out.emplace_back(kAllMetrics[i], kAllMetrics[j]);
    }
  }
  return out;
}

std::string ProblemBundle::dut_name() const {
  const auto d = verilog::parse_declaration(module_header);
  return d ? d->name : std::string{};
}

std::vector<std::string> ProblemBundle::header_ports() const {
  const auto d = verilog::parse_declaration(module_header);
  return d ? d->ports : std::vector<std::string>{};
}

const std::string& ProblemBundle::design(DesignRole r) const {
  switch (r) {
    case DesignRole::Unopt: return unoptimized_src;
    case DesignRole::OptArea: return references.area_src;
    case DesignRole::OptDelay: return references.delay_src;
    case DesignRole::OptPower: break;
  }
  return references.power_src;
}

std::string_view to_string(ThresholdPolicy p) {
  return p == ThresholdPolicy::Explicit ? "explicit" : "unoptimized_baseline";
}

ThresholdPolicy parse_threshold_policy(std::string_view s) {
  if (s == "unoptimized_baseline" || s == "baseline") return ThresholdPolicy::UnoptimizedBaseline;
  if (s == "explicit") return ThresholdPolicy::Explicit;
  throw Error(ErrorKind::InvalidConfig, "unknown threshold policy '" + std::string(s) + "'");
}

const ProblemBundle* Suite::find(const std::string& id) const {
  const auto it = std::lower_bound(bundles.begin(), bundles.end(), id,
                                   [](const ProblemBundle& b, const std::string& k) { return b.id < k; });
  return it != bundles.end() && it->id == id ? &*it : nullptr;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_bundle(const ProblemBundle& b) {
  ValidationReport r;
  r.bundle_id = b.id;
  auto add = [&](std::string name, bool passed, std::string detail = {}) {
    r.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  add("id-nonempty", !blank(b.id));

  const auto decl = verilog::parse_declaration(b.module_header);
  const bool header_ok = decl && !decl->ports.empty();
  add("header-parses", header_ok, header_ok ? "" : "module_header declares no module with ports");

  const bool refs_ok =
      !blank(b.references.area_src) && !blank(b.references.delay_src) && !blank(b.references.power_src);
  add("references-present", refs_ok, refs_ok ? "" : "a reference source is empty");

  if (header_ok) {
    std::string detail;
    for (const auto role : {DesignRole::Unopt, DesignRole::OptArea, DesignRole::OptDelay,
                            DesignRole::OptPower}) {
      const auto mods = verilog::find_modules(b.design(role));
      const bool match = std::any_of(mods.begin(), mods.end(), [&](const auto& m) {
        return verilog::same_port_set(m.ports, decl->ports);
      });
      if (!match) {
        if (!detail.empty()) detail += "; ";
        detail += std::string(to_string(role)) + ": ";
        detail += mods.empty() ? "no module found"
                               : missing_ports_detail(decl->ports, mods.back().ports);
      }
    }
    add("header-consistency", detail.empty(), detail);
  } else {
    add("header-consistency", false, "header unparseable");
  }

  const bool has_opt = verilog::instantiates(b.testbench_src, "opt_model");
  const bool has_unopt = verilog::instantiates(b.testbench_src, "unopt_model");
  std::string inst_detail;
  if (!has_opt) inst_detail += "no opt_model instance";
  if (!has_unopt) inst_detail += std::string(inst_detail.empty() ? "" : "; ") + "no unopt_model instance";
  add("testbench-dual-instantiation", has_opt && has_unopt, inst_detail);

  std::string token_detail;
  for (std::string_view tok : {"Total mismatches:", "Simulation completed.", "TIMEOUT"}) {
    if (b.testbench_src.find(tok) == std::string::npos) {
      token_detail += std::string(token_detail.empty() ? "" : "; ") + "missing \"" + std::string(tok) + "\"";
    }
  }
  add("testbench-verdict-tokens", token_detail.empty(), token_detail);
  return r;
}

ProblemBundle load_bundle(const fs::path& dir) {
  const auto manifest_path = dir / kManifest;
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec)) {
    throw Error(ErrorKind::MissingComponent, "no manifest in " + dir.string(), "manifest");
  }

  YAML::Node root;
  try {
    root = YAML::LoadFile(manifest_path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::MalformedManifest, manifest_path.string() + ": " + e.what());
  }
  if (!root.IsMap()) {
    throw Error(ErrorKind::MalformedManifest, manifest_path.string() + ": expected a mapping");
  }

  ProblemBundle b;
  b.id = scalar_or<std::string>(root, "id", "");
  if (blank(b.id)) throw Error(ErrorKind::MalformedManifest, "manifest has no 'id'", "id");
  if (!root["difficulty"]) {
    throw Error(ErrorKind::MalformedManifest, "manifest has no 'difficulty'", "difficulty");
  }
  b.difficulty = parse_difficulty(scalar_or<std::string>(root, "difficulty", ""));
  b.source = scalar_or<std::string>(root, "source", "");
  b.is_sequential = scalar_or<bool>(root, "is_sequential", false);
  if (const auto tags = root["tags"]) {
    if (!tags.IsSequence()) throw Error(ErrorKind::MalformedManifest, "'tags' must be a list", "tags");
    for (const auto& t : tags) b.tags.push_back(t.as<std::string>());
  }

  ComponentFiles files;
  if (const auto f = root["files"]) {
    if (!f.IsMap()) throw Error(ErrorKind::MalformedManifest, "'files' must be a mapping", "files");
    files.prompt = scalar_or(f, "prompt", files.prompt);
    files.header = scalar_or(f, "header", files.header);
    files.unoptimized = scalar_or(f, "unoptimized", files.unoptimized);
    files.opt_area = scalar_or(f, "opt_area", files.opt_area);
    files.opt_delay = scalar_or(f, "opt_delay", files.opt_delay);
    files.opt_power = scalar_or(f, "opt_power", files.opt_power);
    files.testbench = scalar_or(f, "testbench", files.testbench);
  }

  b.prompt = read_component(dir, files.prompt, "prompt");
  b.module_header = read_component(dir, files.header, "header");
  b.unoptimized_src = read_component(dir, files.unoptimized, "unoptimized");
  b.references.area_file = files.opt_area;
  b.references.delay_file = files.opt_delay;
  b.references.power_file = files.opt_power;
  b.references.area_src = read_component(dir, files.opt_area, "opt_area");
  b.references.delay_src = read_component(dir, files.opt_delay, "opt_delay");
  b.references.power_src = read_component(dir, files.opt_power, "opt_power");
  b.testbench_src = read_component(dir, files.testbench, "testbench");

  const auto report = validate_bundle(b);
  for (const auto& c : report.checks) {
    if (c.passed) continue;
    if (c.name == "header-parses" || c.name == "header-consistency") {
      throw Error(ErrorKind::HeaderMismatch, b.id + ": " + c.detail, b.id);
    }
    if (c.name.rfind("testbench", 0) == 0) {
      throw Error(ErrorKind::InvalidTestbench, b.id + ": " + c.name + ": " + c.detail, b.id);
    }
    throw Error(ErrorKind::MalformedManifest, b.id + ": " + c.name + " " + c.detail, b.id);
  }
  return b;
}

void serialize_bundle(const ProblemBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  std::map<std::string, const std::string*> written;
  auto emit = [&](const std::string& file, const std::string& content) {
    if (const auto it = written.find(file); it != written.end()) {
      if (*it->second != content) {
        throw Error(ErrorKind::InvalidConfig,
                    b.id + ": '" + file + "' is named by two components with different contents");
      }
      return;
    }
    write_text_file(dir / file, content);
    written.emplace(file, &content);
  };
  const ComponentFiles defaults;
  emit(defaults.prompt, b.prompt);
  emit(defaults.header, b.module_header);
  emit(defaults.unoptimized, b.unoptimized_src);
  emit(b.references.area_file, b.references.area_src);
  emit(b.references.delay_file, b.references.delay_src);
  emit(b.references.power_file, b.references.power_src);
  emit(defaults.testbench, b.testbench_src);

  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << b.id;
  out << YAML::Key << "difficulty" << YAML::Value << std::string(to_string(b.difficulty));
  out << YAML::Key << "source" << YAML::Value << b.source;
  out << YAML::Key << "is_sequential" << YAML::Value << b.is_sequential;
  out << YAML::Key << "tags" << YAML::Value << YAML::Flow << b.tags;
  out << YAML::Key << "files" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "prompt" << YAML::Value << defaults.prompt;
  out << YAML::Key << "header" << YAML::Value << defaults.header;
  out << YAML::Key << "unoptimized" << YAML::Value << defaults.unoptimized;
  out << YAML::Key << "opt_area" << YAML::Value << b.references.area_file;
  out << YAML::Key << "opt_delay" << YAML::Value << b.references.delay_file;
  out << YAML::Key << "opt_power" << YAML::Value << b.references.power_file;
  out << YAML::Key << "testbench" << YAML::Value << defaults.testbench;
  out << YAML::EndMap;
  out << YAML::EndMap;
  write_text_file(dir / kManifest, std::string(out.c_str()) + "\n");
}

Suite load_suite(const fs::path& manifest) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(manifest.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorKind::Io, "cannot read suite manifest " + manifest.string(), manifest.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::MalformedManifest, manifest.string() + ": " + e.what());
  }
  if (!root.IsMap()) throw Error(ErrorKind::MalformedManifest, manifest.string() + ": expected a mapping");

  Suite s;
  s.name = scalar_or<std::string>(root, "suite", manifest.stem().string());
  s.threshold_policy =
      parse_threshold_policy(scalar_or<std::string>(root, "threshold_policy", "unoptimized_baseline"));

  const auto base = manifest.parent_path();
  if (const auto list = root["bundles"]) {
    if (!list.IsSequence()) throw Error(ErrorKind::MalformedManifest, "'bundles' must be a list", "bundles");
    for (const auto& entry : list) {
      const fs::path rel = entry.as<std::string>();
      const auto dir = rel.is_absolute() ? rel : base / rel;
      try {
        s.bundles.push_back(load_bundle(dir));
      } catch (const Error& e) {
        throw Error(e.kind(), "bundle " + rel.string() + ": " + e.what(),
                    e.subject().empty() ? rel.string() : e.subject());
      }
    }
  }
  std::sort(s.bundles.begin(), s.bundles.end(),
            [](const ProblemBundle& a, const ProblemBundle& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < s.bundles.size(); ++i) {
    if (s.bundles[i].id == s.bundles[i - 1].id) {
      throw Error(ErrorKind::DuplicateId, "problem id '" + s.bundles[i].id + "' appears twice",
                  s.bundles[i].id);
    }
  }

  if (const auto t = root["thresholds"]) {
    if (!t.IsMap()) throw Error(ErrorKind::MalformedManifest, "'thresholds' must be a mapping", "thresholds");
    for (const auto& kv : t) {
      const auto id = kv.first.as<std::string>();
      if (!s.find(id)) {
        throw Error(ErrorKind::MalformedManifest, "threshold override for unknown problem '" + id + "'", id);
      }
      MetricVector v;
      for (const auto m : kAllMetrics) {
        const std::string key(to_string(m));
        if (kv.second[key]) v.set(m, kv.second[key].as<double>());
      }
      s.threshold_overrides[id] = v;
    }
  }
  if (s.threshold_policy == ThresholdPolicy::Explicit) {
    for (const auto& b : s.bundles) {
      if (!s.threshold_overrides.count(b.id)) {
        throw Error(ErrorKind::MalformedManifest,
                    "explicit threshold policy but no thresholds for '" + b.id + "'", b.id);
      }
    }
  }
  return s;
}

}  // namespace effbench
