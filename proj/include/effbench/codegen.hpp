#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "effbench/problem_store.hpp"
#include "effbench/types.hpp"

namespace effbench {

struct GenerationConfig {
  std::string endpoint_url = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model_name;
  int n = 10;
  double temperature = 0.8;
  int max_tokens = 4096;
  MetricKind target_metric = MetricKind::Area;
  double request_timeout_s = 300.0;
  int retry_limit = 3;
  /// Environment variable holding the bearer token; empty disables auth.
  std::string auth_env = "EFFBENCH_API_KEY";

  /// Throws Error(InvalidConfig) on n < 1, retry_limit outside [0, 8], and
  /// other out-of-range values.
  void validate() const;
};

enum class ExtractionStatus { Ok, NoModuleFound, MultipleModulesMerged, RequestFailed };

std::string_view to_string(ExtractionStatus s);
ExtractionStatus parse_extraction_status(std::string_view s);

inline bool extracted(ExtractionStatus s) {
  return s == ExtractionStatus::Ok || s == ExtractionStatus::MultipleModulesMerged;
}

struct CandidateSample {
  std::string problem_id;
  Formulation formulation = Formulation::P1RewriteUnoptimized;
  MetricKind target_metric = MetricKind::Area;
  int sample_index = 0;
  std::string raw_response;
  std::optional<std::string> extracted_src;
  ExtractionStatus extraction_status = ExtractionStatus::NoModuleFound;
  std::string error;  // request failure detail
};

struct ChatRequest {
  std::string system;
  std::string user;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 0;
  double timeout_s = 300.0;
  // Context for test doubles; not sent on the wire.
  std::string problem_id;
  Formulation formulation = Formulation::P1RewriteUnoptimized;
  MetricKind target_metric = MetricKind::Area;
  int sample_index = 0;
};

struct ChatResponse {
  bool ok = false;
  std::string content;
  std::string error;
};

/// A chat-completion endpoint. Implementations throw Error(EndpointUnreachable)
/// when no connection can be made and return ok=false for answered-but-failed
/// requests. Must be safe to call from several threads.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

/// System message used for every request.
std::string system_prompt();

/// Deterministic user prompt. P1 embeds the baseline source; P2 embeds the task
/// description. Both embed the module header and name the target metric.
std::string build_prompt(const ProblemBundle& b, Formulation f, MetricKind target);

struct Extraction {
  std::string src;
  ExtractionStatus status = ExtractionStatus::NoModuleFound;
};

/// Pulls Verilog out of a model response. Modules inside the first fenced code
/// block that has any are preferred over modules in the surrounding text. All
/// modules of that region are kept, separated by blank lines; the one whose port
/// set matches `header` (last such one on ties) is renamed to the header's
/// module name.
Extraction extract_verilog(std::string_view raw, std::string_view header);

/// Receives every response before extraction so it can be persisted verbatim.
using ResponseSink = std::function<void(int sample_index, const ChatResponse&)>;
/// Returns a previously persisted response for a sample index, if any.
using ResponseCache = std::function<std::optional<ChatResponse>(int sample_index)>;

/// Draws exactly cfg.n samples (indices 0..n-1). Failed requests, after
/// cfg.retry_limit retries, become RequestFailed samples. Connection failures
/// exhausting the retries propagate as Error(EndpointUnreachable).
std::vector<CandidateSample> generate_samples(const ProblemBundle& b, const GenerationConfig& cfg,
                                              Formulation f, ChatClient& client,
                                              const ResponseSink& sink = {},
                                              const ResponseCache& cache = {},
                                              std::size_t workers = 1);

/// Scripted model for tests and dry runs.
class MockChatClient : public ChatClient {
 public:
  enum class Mode {
    References,  // the bundle's reference for the target metric
    Baseline,    // the bundle's unoptimized source
    Mixed,       // cycles reference / baseline / wrong reference / prose by index
  };

  MockChatClient(std::vector<ProblemBundle> bundles, Mode mode);

  ChatResponse complete(const ChatRequest& req) override;

  /// Sample indices answered with an HTTP-style failure.
  void fail_indices(std::set<int> idx) { fail_ = std::move(idx); }
  /// After `n` successful calls every further call throws EndpointUnreachable.
  void go_unreachable_after(int n) { unreachable_after_ = n; }

  std::vector<ChatRequest> requests() const;
  int calls() const;

 private:
  std::vector<ProblemBundle> bundles_;
  Mode mode_;
  std::set<int> fail_;
  int unreachable_after_ = -1;
  mutable std::mutex mu_;
  std::vector<ChatRequest> log_;
};

std::string_view to_string(MockChatClient::Mode m);
MockChatClient::Mode parse_mock_mode(std::string_view s);

}  // namespace effbench
