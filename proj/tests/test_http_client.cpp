// HttpChatClient against an in-process HTTP server on the loopback interface.
#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "motionseg/llm_harness.hpp"
#include "motionseg/http_chat_client.hpp"

using namespace motionseg;
using namespace motionseg::llm;

namespace {

class LocalServer {
 public:
  LocalServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (fail_first_ > 0) {
        --fail_first_;
        res.status = 503;
        return;
      }
      if (status_ != 200) {
        res.status = status_;
        res.set_content("denied", "text/plain");
        return;
      }
      const nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content_}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> hits_{0};
  std::atomic<int> fail_first_{0};
  int status_ = 200;
  std::string content_ = "twist (Index 0–62), tilt (Index 63–112), pull (Index 113–170)";
  std::string last_body_;
  std::string last_auth_;
};

LlmClientConfig config_for(const LocalServer& s) {
  LlmClientConfig c;
  c.endpoint = s.url();
  c.model = "test-model";
  c.api_key_env = "MOTIONSEG_TEST_KEY";
  c.timeout_s = 5;
  return c;
}

ChatRequest request() {
  ChatRequest r;
  r.messages = {{"system", "sys"}, {"user", "hello"}};
  return r;
}

}  // namespace

TEST(SplitUrl, Parts) {
  const auto p = split_url("https://api.example.com:8443/v1/chat/completions");
  EXPECT_EQ(p.scheme_host_port, "https://api.example.com:8443");
  EXPECT_EQ(p.path, "/v1/chat/completions");
  EXPECT_EQ(split_url("http://localhost").path, "/");
  EXPECT_THROW(split_url("ftp://x/y"), Error);
  EXPECT_THROW(split_url("no-scheme"), Error);
}

TEST(ExtractReplyContent, Shapes) {
  EXPECT_EQ(extract_reply_content(R"({"choices":[{"message":{"content":"hi"}}]})"), "hi");
  EXPECT_THROW(extract_reply_content("not json"), TransportError);
  EXPECT_THROW(extract_reply_content(R"({"choices":[]})"), TransportError);
}

TEST(HttpChatClient, SendsRequestAndReturnsContent) {
  LocalServer server;
  ::setenv("MOTIONSEG_TEST_KEY", "secret-token", 1);
  HttpChatClient client(config_for(server));
  const std::string reply = client.complete(request());
  EXPECT_EQ(reply, server.content_);
  EXPECT_EQ(server.last_auth_, "Bearer secret-token");
  const auto body = nlohmann::json::parse(server.last_body_);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][1]["content"], "hello");
  ::unsetenv("MOTIONSEG_TEST_KEY");
}

TEST(HttpChatClient, ServerErrorsAreTransientAndRetried) {
  LocalServer server;
  server.fail_first_ = 2;
  HttpChatClient client(config_for(server));
  try {
    client.complete(request());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.transient());
  }

  const auto bundle = build_prompt(parse_approach("a"), {}, [] {
    VelocitySeries s;
    s.rate = 20;
    for (int k = 0; k < 10; ++k) s.samples.push_back({k / 20.0, Vec6::Zero()});
    return s;
  }(), {});
  InferenceOptions opt;
  opt.retry.sleep = [](std::chrono::milliseconds) {};
  const auto r = run_inference(bundle, client, opt);
  EXPECT_EQ(r.attempts, 2);
  EXPECT_EQ(r.result.segments.size(), 3u);
}

TEST(HttpChatClient, ClientErrorIsPermanent) {
  LocalServer server;
  server.status_ = 401;
  HttpChatClient client(config_for(server));
  try {
    client.complete(request());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_FALSE(e.transient());
  }
}

TEST(HttpChatClient, ConnectionRefusedIsTransient) {
  int port = 0;
  {
    LocalServer server;
    port = server.port_;
  }
  LlmClientConfig c;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  c.timeout_s = 1;
  HttpChatClient client(c);
  try {
    client.complete(request());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.transient());
  }
}
