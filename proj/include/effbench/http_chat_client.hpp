#pragma once

#include <string>

#include "effbench/codegen.hpp"

namespace effbench {

/// Client for OpenAI-style `/chat/completions` endpoints (hosted or local).
class HttpChatClient : public ChatClient {
 public:
  /// `url` is the full endpoint URL, e.g. http://localhost:8000/v1/chat/completions.
  /// When `auth_env` is nonempty the variable must be set (Error(AuthMissing)
  /// otherwise) and its value is sent as a bearer token.
  HttpChatClient(std::string url, std::string auth_env);

  ChatResponse complete(const ChatRequest& req) override;

  /// Request body sent for `req`.
  static std::string request_body(const ChatRequest& req);
  /// Assistant message from a response body; nullopt if the body is not a
  /// chat-completion response.
  static std::optional<std::string> parse_response(const std::string& body);

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::string token_;
};

}  // namespace effbench
