#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace effbench {

enum class MetricKind { Area, Delay, Power };

inline constexpr std::array<MetricKind, 3> kAllMetrics{MetricKind::Area, MetricKind::Delay,
                                                       MetricKind::Power};

constexpr std::size_t index_of(MetricKind m) { return static_cast<std::size_t>(m); }

std::string_view to_string(MetricKind m);
/// Accepts "area"/"Area"/"AREA" etc. Throws Error(InvalidConfig) otherwise.
MetricKind parse_metric_kind(std::string_view s);

/// {area, delay, power}. Units follow the backend: area in library units (um^2),
/// delay in ns, power in mW. A metric the backend did not produce is nullopt, never 0.
struct MetricVector {
  std::optional<double> area;
  std::optional<double> delay;
  std::optional<double> power;

  const std::optional<double>& get(MetricKind m) const;
  std::optional<double>& get(MetricKind m);
  void set(MetricKind m, double v) { get(m) = v; }

  bool operator==(const MetricVector&) const = default;
};

enum class Difficulty { Easy, Medium, Hard };

std::string_view to_string(Difficulty d);
Difficulty parse_difficulty(std::string_view s);

enum class Formulation { P1RewriteUnoptimized, P2FromSpecification };

/// "P1" / "P2".
std::string_view to_string(Formulation f);
Formulation parse_formulation(std::string_view s);

/// Which design of a bundle a piece of Verilog plays.
enum class DesignRole { Unopt, OptArea, OptDelay, OptPower };

std::string_view to_string(DesignRole r);
DesignRole parse_design_role(std::string_view s);
DesignRole reference_role(MetricKind m);

}  // namespace effbench
