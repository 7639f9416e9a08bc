#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace effbench {

enum class ErrorKind {
  // problem_store
  MissingComponent,
  HeaderMismatch,
  MalformedManifest,
  InvalidTestbench,
  DuplicateId,
  // codegen
  EndpointUnreachable,
  AuthMissing,
  // sim / synth
  RenameFailure,
  SimulatorNotFound,
  ToolNotFound,
  MetricNotFound,
  // metrics
  DegenerateThreshold,
  InvalidK,
  InvalidTable,
  EmptySuite,
  TooLarge,
  // report / ablation
  UnpairedProblem,
  InsufficientBackends,
  AllCellsFailed,
  // pipeline
  IncompleteRun,
  ConfigMismatch,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind k);

/// All library failures surface as this type. `subject()` carries the entity the
/// error is about (component name, problem id, metric...) for programmatic checks.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string subject = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

  /// Missing tools, unreachable endpoints, credentials: the run cannot proceed and
  /// the failure says nothing about the candidate being evaluated.
  bool is_environment() const noexcept;

 private:
  ErrorKind kind_;
  std::string subject_;
};

}  // namespace effbench
