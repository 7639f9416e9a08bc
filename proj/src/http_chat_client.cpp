#include "effbench/http_chat_client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "effbench/error.hpp"

namespace effbench {

using nlohmann::json;

HttpChatClient::HttpChatClient(std::string url, std::string auth_env) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorKind::InvalidConfig, "endpoint URL '" + url + "' is not http(s)://host/path",
                url);
  }
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
  if (!auth_env.empty()) {
    const char* v = std::getenv(auth_env.c_str());
    if (!v || !*v) {
      throw Error(ErrorKind::AuthMissing, "environment variable " + auth_env + " is not set",
                  auth_env);
    }
    token_ = v;
  }
}

std::string HttpChatClient::request_body(const ChatRequest& req) {
  json body = {
      {"model", req.model},
      {"messages", json::array({{{"role", "system"}, {"content", req.system}},
                                {{"role", "user"}, {"content", req.user}}})},
      {"temperature", req.temperature},
      {"max_tokens", req.max_tokens},
      {"n", 1},
  };
  return body.dump();
}

std::optional<std::string> HttpChatClient::parse_response(const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) return std::nullopt;
    return content.get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

ChatResponse HttpChatClient::complete(const ChatRequest& req) {
  httplib::Client cli(origin_);
  const auto secs = static_cast<time_t>(req.timeout_s);
  const auto usecs = static_cast<time_t>((req.timeout_s - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

  const auto res = cli.Post(path_, headers, request_body(req), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write) {
      return {false, "", "transport error: " + httplib::to_string(err)};
    }
    throw Error(ErrorKind::EndpointUnreachable,
                origin_ + path_ + ": " + httplib::to_string(err), origin_);
  }
  if (res->status != 200) {
    return {false, res->body, "HTTP " + std::to_string(res->status)};
  }
  auto content = parse_response(res->body);
  if (!content) return {false, res->body, "response is not a chat completion"};
  return {true, std::move(*content), ""};
}

}  // namespace effbench
