#include "effbench/types.hpp"

#include <algorithm>
#include <cctype>

#include "effbench/error.hpp"

namespace effbench {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(MetricKind m) {
  switch (m) {
    case MetricKind::Area: return "area";
    case MetricKind::Delay: return "delay";
    case MetricKind::Power: return "power";
  }
  return "?";
}

MetricKind parse_metric_kind(std::string_view s) {
  const auto l = lower(s);
  if (l == "area") return MetricKind::Area;
  if (l == "delay") return MetricKind::Delay;
  if (l == "power") return MetricKind::Power;
  throw Error(ErrorKind::InvalidConfig, "unknown metric '" + std::string(s) + "'");
}

const std::optional<double>& MetricVector::get(MetricKind m) const {
  switch (m) {
    case MetricKind::Area: return area;
    case MetricKind::Delay: return delay;
    case MetricKind::Power: break;
  }
  return power;
}

std::optional<double>& MetricVector::get(MetricKind m) {
  return const_cast<std::optional<double>&>(std::as_const(*this).get(m));
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Medium: return "Medium";
    case Difficulty::Hard: return "Hard";
  }
  return "?";
}

Difficulty parse_difficulty(std::string_view s) {
  const auto l = lower(s);
  if (l == "easy") return Difficulty::Easy;
  if (l == "medium") return Difficulty::Medium;
  if (l == "hard") return Difficulty::Hard;
  throw Error(ErrorKind::MalformedManifest, "unknown difficulty '" + std::string(s) + "'",
              "difficulty");
}

std::string_view to_string(Formulation f) {
  return f == Formulation::P1RewriteUnoptimized ? "P1" : "P2";
}

Formulation parse_formulation(std::string_view s) {
  const auto l = lower(s);
  if (l == "p1" || l == "rewrite") return Formulation::P1RewriteUnoptimized;
  if (l == "p2" || l == "spec") return Formulation::P2FromSpecification;
  throw Error(ErrorKind::InvalidConfig, "unknown formulation '" + std::string(s) + "'");
}

std::string_view to_string(DesignRole r) {
  switch (r) {
    case DesignRole::Unopt: return "unopt";
    case DesignRole::OptArea: return "opt_area";
    case DesignRole::OptDelay: return "opt_delay";
    case DesignRole::OptPower: return "opt_power";
  }
  return "?";
}

DesignRole parse_design_role(std::string_view s) {
  const auto l = lower(s);
  if (l == "unopt" || l == "unoptimized") return DesignRole::Unopt;
  if (l == "opt_area") return DesignRole::OptArea;
  if (l == "opt_delay") return DesignRole::OptDelay;
  if (l == "opt_power") return DesignRole::OptPower;
  throw Error(ErrorKind::InvalidConfig, "unknown design role '" + std::string(s) + "'");
}

DesignRole reference_role(MetricKind m) {
  switch (m) {
    case MetricKind::Area: return DesignRole::OptArea;
    case MetricKind::Delay: return DesignRole::OptDelay;
    case MetricKind::Power: break;
  }
  return DesignRole::OptPower;
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::MissingComponent: return "MissingComponent";
    case ErrorKind::HeaderMismatch: return "HeaderMismatch";
    case ErrorKind::MalformedManifest: return "MalformedManifest";
    case ErrorKind::InvalidTestbench: return "InvalidTestbench";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorKind::AuthMissing: return "AuthMissing";
    case ErrorKind::RenameFailure: return "RenameFailure";
    case ErrorKind::SimulatorNotFound: return "SimulatorNotFound";
    case ErrorKind::ToolNotFound: return "ToolNotFound";
    case ErrorKind::MetricNotFound: return "MetricNotFound";
    case ErrorKind::DegenerateThreshold: return "DegenerateThreshold";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::InvalidTable: return "InvalidTable";
    case ErrorKind::EmptySuite: return "EmptySuite";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::UnpairedProblem: return "UnpairedProblem";
    case ErrorKind::InsufficientBackends: return "InsufficientBackends";
    case ErrorKind::AllCellsFailed: return "AllCellsFailed";
    case ErrorKind::IncompleteRun: return "IncompleteRun";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string message, std::string subject)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      subject_(std::move(subject)) {}

bool Error::is_environment() const noexcept {
  switch (kind_) {
    case ErrorKind::EndpointUnreachable:
    case ErrorKind::AuthMissing:
    case ErrorKind::SimulatorNotFound:
    case ErrorKind::ToolNotFound:
    case ErrorKind::Io:
      return true;
    default:
      return false;
  }
}

}  // namespace effbench
