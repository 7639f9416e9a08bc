#include "effbench/codegen.hpp"

#include <algorithm>

#include "effbench/error.hpp"
#include "effbench/verilog.hpp"
#include "effbench/worker_pool.hpp"

namespace effbench {

void GenerationConfig::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::InvalidConfig, "generation config: " + what);
  };
  if (n < 1) bad("n must be at least 1");
  if (retry_limit < 0 || retry_limit > 8) bad("retry_limit must lie in [0, 8]");
  if (!(temperature >= 0.0)) bad("temperature must be non-negative");
  if (max_tokens < 1) bad("max_tokens must be positive");
  if (!(request_timeout_s > 0.0)) bad("request_timeout must be positive");
}

std::string_view to_string(ExtractionStatus s) {
  switch (s) {
    case ExtractionStatus::Ok: return "ok";
    case ExtractionStatus::NoModuleFound: return "no_module_found";
    case ExtractionStatus::MultipleModulesMerged: return "multiple_modules_merged";
    case ExtractionStatus::RequestFailed: return "request_failed";
  }
  return "?";
}

ExtractionStatus parse_extraction_status(std::string_view s) {
  for (auto st : {ExtractionStatus::Ok, ExtractionStatus::NoModuleFound,
                  ExtractionStatus::MultipleModulesMerged, ExtractionStatus::RequestFailed}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown extraction status '" + std::string(s) + "'");
}

namespace {

std::string_view objective_phrase(MetricKind m) {
  switch (m) {
    case MetricKind::Area: return "minimal silicon area (total standard-cell area after synthesis)";
    case MetricKind::Delay: return "minimal critical-path delay after synthesis";
    case MetricKind::Power: return "minimal total power consumption after synthesis";
  }
  return "";
}

std::string trim_newlines(std::string_view s) {
  while (!s.empty() && (s.front() == '\n' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return std::string(s);
}

/// Contents of fenced ``` blocks, in order. An unterminated fence runs to the end.
std::vector<std::string_view> fenced_blocks(std::string_view raw) {
  std::vector<std::string_view> blocks;
  std::size_t pos = 0;
  auto fence_at = [&](std::size_t line_begin) {
    auto i = line_begin;
    while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i;
    return raw.compare(i, 3, "```") == 0;
  };
  std::optional<std::size_t> open;
  while (pos < raw.size()) {
    auto eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    if (fence_at(pos)) {
      if (!open) {
        open = std::min(eol + 1, raw.size());
      } else {
        blocks.push_back(raw.substr(*open, pos - *open));
        open.reset();
      }
    }
    pos = eol + 1;
  }
  if (open) blocks.push_back(raw.substr(*open));
  return blocks;
}

}  // namespace

std::string system_prompt() {
  return "You are an expert digital hardware designer. You write synthesizable Verilog that "
         "is functionally correct and optimized for the requested implementation metric.";
}

std::string build_prompt(const ProblemBundle& b, Formulation f, MetricKind target) {
  const auto header = trim_newlines(b.module_header);
  std::string p;
  if (f == Formulation::P1RewriteUnoptimized) {
    p += "Rewrite the Verilog module below so that it achieves " +
         std::string(objective_phrase(target)) +
         ". The rewritten module must be functionally equivalent to the original: same "
         "outputs for the same inputs, cycle for cycle on every clock edge.\n\n";
  } else {
    p += "Implement the hardware module described below in Verilog, optimized for " +
         std::string(objective_phrase(target)) + ".\n\n";
    p += "Task description:\n" + trim_newlines(b.prompt) + "\n\n";
  }
  p += "Target metric: " + std::string(to_string(target)) + "\n\n";
  p += "Module interface (keep this module name and exactly these ports):\n```verilog\n" + header +
       "\n```\n\n";
  if (f == Formulation::P1RewriteUnoptimized) {
    // Embedded verbatim so the prompt contains the baseline byte for byte.
    const auto& base = b.unoptimized_src;
    p += "Unoptimized implementation:\n```verilog\n" + base +
         (base.empty() || base.back() != '\n' ? "\n" : "") + "```\n\n";
  }
  p += "Answer with the complete module, including any helper modules it needs, in a single "
       "```verilog code block.\n";
  return p;
}

Extraction extract_verilog(std::string_view raw, std::string_view header) {
  std::string_view region;
  std::vector<verilog::ModuleSpan> mods;
  for (auto block : fenced_blocks(raw)) {
    mods = verilog::find_modules(block);
    if (!mods.empty()) {
      region = block;
      break;
    }
  }
  if (mods.empty()) {
    region = raw;
    mods = verilog::find_modules(raw);
  }
  if (mods.empty()) return {"", ExtractionStatus::NoModuleFound};

  const auto decl = verilog::parse_declaration(header);
  std::optional<std::size_t> top;
  if (decl) top = verilog::select_top(mods, decl->ports);

  Extraction out;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    if (i) out.src += "\n\n";
    out.src += (top && *top == i) ? verilog::module_text(region, mods[i], decl->name)
                                  : verilog::module_text(region, mods[i]);
  }
  out.src += '\n';
  out.status = mods.size() > 1 ? ExtractionStatus::MultipleModulesMerged : ExtractionStatus::Ok;
  return out;
}

std::vector<CandidateSample> generate_samples(const ProblemBundle& b, const GenerationConfig& cfg,
                                              Formulation f, ChatClient& client,
                                              const ResponseSink& sink,
                                              const ResponseCache& cache, std::size_t workers) {
  cfg.validate();
  const auto user = build_prompt(b, f, cfg.target_metric);
  std::vector<CandidateSample> samples(static_cast<std::size_t>(cfg.n));

  parallel_for(samples.size(), workers, [&](std::size_t idx) {
    const int j = static_cast<int>(idx);
    std::optional<ChatResponse> resp;
    if (cache) resp = cache(j);
    if (!resp) {
      ChatRequest req;
      req.system = system_prompt();
      req.user = user;
      req.model = cfg.model_name;
      req.temperature = cfg.temperature;
      req.max_tokens = cfg.max_tokens;
      req.timeout_s = cfg.request_timeout_s;
      req.problem_id = b.id;
      req.formulation = f;
      req.target_metric = cfg.target_metric;
      req.sample_index = j;
      for (int attempt = 0;; ++attempt) {
        try {
          resp = client.complete(req);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::EndpointUnreachable || attempt >= cfg.retry_limit) throw;
          continue;
        }
        if (resp->ok || attempt >= cfg.retry_limit) break;
      }
      if (sink) sink(j, *resp);
    }

    auto& s = samples[idx];
    s.problem_id = b.id;
    s.formulation = f;
    s.target_metric = cfg.target_metric;
    s.sample_index = j;
    s.raw_response = resp->content;
    if (!resp->ok) {
      s.extraction_status = ExtractionStatus::RequestFailed;
      s.error = resp->error;
      return;
    }
    auto ex = extract_verilog(resp->content, b.module_header);
    s.extraction_status = ex.status;
    if (extracted(ex.status)) s.extracted_src = std::move(ex.src);
  });
  return samples;
}

MockChatClient::MockChatClient(std::vector<ProblemBundle> bundles, Mode mode)
    : bundles_(std::move(bundles)), mode_(mode) {}

ChatResponse MockChatClient::complete(const ChatRequest& req) {
  {
    std::lock_guard lock(mu_);
    if (unreachable_after_ >= 0 && static_cast<int>(log_.size()) >= unreachable_after_) {
      throw Error(ErrorKind::EndpointUnreachable, "mock endpoint went away", "mock");
    }
    log_.push_back(req);
  }
  if (fail_.count(req.sample_index)) return {false, "", "HTTP 500: injected failure"};

  const auto it = std::find_if(bundles_.begin(), bundles_.end(),
                               [&](const ProblemBundle& b) { return b.id == req.problem_id; });
  if (it == bundles_.end()) return {true, "I do not know this problem.", ""};
  const auto& b = *it;

  auto fenced = [](const std::string& src) { return "```verilog\n" + src + "```\n"; };
  const auto& ref = b.references.source(req.target_metric);
  switch (mode_) {
    case Mode::References: return {true, fenced(ref), ""};
    case Mode::Baseline: return {true, fenced(b.unoptimized_src), ""};
    case Mode::Mixed: break;
  }
  switch (req.sample_index % 4) {
    case 0: return {true, "Here is the optimized design.\n\n" + fenced(ref), ""};
    case 1: return {true, fenced(b.unoptimized_src), ""};
    case 2: {
      // Functionally wrong variant: the directive makes the mock simulator report mismatches.
      auto wrong = ref;
      const auto p = wrong.rfind("endmodule");
      wrong.insert(p == std::string::npos ? wrong.size() : p, "// mocksim: mismatches=3\n");
      return {true, fenced(wrong), ""};
    }
    default:
      return {true, "Optimizing this design requires a careful analysis of the critical path.",
              ""};
  }
}

std::vector<ChatRequest> MockChatClient::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

int MockChatClient::calls() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(log_.size());
}

std::string_view to_string(MockChatClient::Mode m) {
  switch (m) {
    case MockChatClient::Mode::References: return "references";
    case MockChatClient::Mode::Baseline: return "baseline";
    case MockChatClient::Mode::Mixed: return "mixed";
  }
  return "?";
}

MockChatClient::Mode parse_mock_mode(std::string_view s) {
  for (auto m : {MockChatClient::Mode::References, MockChatClient::Mode::Baseline,
                 MockChatClient::Mode::Mixed}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown mock model mode '" + std::string(s) + "'");
}

}  // namespace effbench
