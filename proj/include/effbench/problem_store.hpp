#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effbench/types.hpp"

namespace effbench {

/// The three single-metric expert references. Two or three entries may come
/// from the same file; that aliasing is kept rather than flattened away.
struct ReferenceSet {
  std::string area_src;
  std::string delay_src;
  std::string power_src;
  // Manifest file names per reference, used to detect and preserve aliasing.
  std::string area_file = "opt_area.v";
  std::string delay_file = "opt_delay.v";
  std::string power_file = "opt_power.v";

  const std::string& source(MetricKind m) const;
  const std::string& file(MetricKind m) const;

  /// Pairs of metrics whose references are the same file, e.g. {Area, Power}.
  std::vector<std::pair<MetricKind, MetricKind>> aliases() const;
  bool aliased(MetricKind a, MetricKind b) const { return file(a) == file(b); }

  bool operator==(const ReferenceSet&) const = default;
};

struct ProblemBundle {
  std::string id;
  Difficulty difficulty = Difficulty::Easy;
  std::string source;
  std::string prompt;
  std::string module_header;
  std::string unoptimized_src;
  ReferenceSet references;
  std::string testbench_src;
  bool is_sequential = false;
  std::vector<std::string> tags;

  /// Module name declared by module_header; the canonical DUT name.
  std::string dut_name() const;
  std::vector<std::string> header_ports() const;
  /// Source text of a design role (baseline or one of the references).
  const std::string& design(DesignRole r) const;

  bool operator==(const ProblemBundle&) const = default;
};

enum class ThresholdPolicy { UnoptimizedBaseline, Explicit };

std::string_view to_string(ThresholdPolicy p);
ThresholdPolicy parse_threshold_policy(std::string_view s);

struct Suite {
  std::string name;
  ThresholdPolicy threshold_policy = ThresholdPolicy::UnoptimizedBaseline;
  /// Per-problem explicit upper bounds T. Used when present; mandatory for every
  /// problem under ThresholdPolicy::Explicit.
  std::map<std::string, MetricVector> threshold_overrides;
  std::vector<ProblemBundle> bundles;  // sorted by id

  const ProblemBundle* find(const std::string& id) const;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::string bundle_id;
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* find(std::string_view name) const;
};

/// Loads the bundle stored in `dir`: a YAML `manifest` naming the component files.
ProblemBundle load_bundle(const std::filesystem::path& dir);

/// Writes `b` in the on-disk layout load_bundle() reads. Aliased references are
/// written once and named twice in the manifest.
void serialize_bundle(const ProblemBundle& b, const std::filesystem::path& dir);

/// Loads a suite manifest; bundle paths are relative to the manifest's directory.
Suite load_suite(const std::filesystem::path& manifest);

/// Pure invariant check. Check names:
///   id-nonempty, header-parses, header-consistency, references-present,
///   testbench-dual-instantiation, testbench-verdict-tokens
ValidationReport validate_bundle(const ProblemBundle& b);

}  // namespace effbench
