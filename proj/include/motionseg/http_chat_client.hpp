// JSON chat-completion client over HTTP(S) using cpp-httplib. HTTPS requires
// building with CPPHTTPLIB_OPENSSL_SUPPORT.
#pragma once

// Eigen must be seen before httplib's system headers.
#include "motionseg/error.hpp"
#include "motionseg/llm_harness.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <string>

namespace motionseg::llm {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "https://api.example.com:443"
  std::string path;              // e.g. "/v1/chat/completions"
};

inline ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::kInvalidArgument, "endpoint URL lacks a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorCode::kInvalidArgument, "unsupported URL scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl p;
  p.scheme_host_port = url.substr(0, path_start);
  p.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  return p;
}

/// Extracts `choices[0].message.content` from a chat-completion response.
inline std::string extract_reply_content(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("response is not JSON: ") + e.what(), false);
  }
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("response lacks choices[0].message.content", false);
  }
}

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(LlmClientConfig config) : config_(std::move(config)), url_(split_url(config_.endpoint)) {
    config_.validate();
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }

  std::string complete(const ChatRequest& request) override {
    httplib::Client cli(url_.scheme_host_port);
    const auto secs = static_cast<time_t>(config_.timeout_s);
    const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    ChatRequest req = request;
    if (req.model.empty()) req.model = config_.model;
    const auto res = cli.Post(url_.path, headers, req.to_json().dump(), "application/json");
    if (!res) {
      throw TransportError("request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()), true);
    }
    if (res->status == 429 || res->status >= 500) {
      throw TransportError("HTTP " + std::to_string(res->status), true);
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body, false);
    }
    return extract_reply_content(res->body);
  }

 private:
  LlmClientConfig config_;
  ParsedUrl url_;
  std::string api_key_;
};

}  // namespace motionseg::llm
