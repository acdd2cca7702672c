// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

namespace nlflow::llm {

using nlohmann::json;

namespace {

struct Url {
  std::string origin; // scheme://host:port
  std::string path;
};

Url split_url(const std::string &url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0)
    throw ConfigError("completion endpoint must be an http:// URL, got \"" + url + "\"");
  std::size_t slash = url.find('/', scheme.size());
  if (slash == std::string::npos)
    return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

} // namespace

std::string HttpCompletionClient::complete(const std::string &prompt, const PromptConfig &config) {
  Url url = split_url(config.endpoint);
  httplib::Client client(url.origin);
  auto timeout = std::chrono::duration<double>(config.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!config.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config.api_key);
  auto res = client.Post(url.path, headers, request_body(prompt, config), "application/json");
  if (!res)
    throw TransportError("completion request to " + config.endpoint +
                         " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("completion service returned HTTP " + std::to_string(res->status));
  return res->body;
}

// ---------------------------------------------------------------------------

struct MockCompletionServer::Impl {
  json fixture;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  mutable std::mutex mu;
  std::vector<std::string> prompts;

  const json *match(const std::string &prompt) const {
    std::size_t cut = prompt.rfind("\n\n");
    std::string query = cut == std::string::npos ? prompt : prompt.substr(cut + 2);
    if (fixture.contains("rules"))
      for (const auto &rule : fixture["rules"])
        if (query.find(rule.value("contains", std::string())) != std::string::npos)
          return &rule;
    if (fixture.contains("default"))
      return &fixture["default"];
    return nullptr;
  }

  void handle(const httplib::Request &req, httplib::Response &res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error &) {
      res.status = 400;
      res.set_content(R"({"error":"request body is not JSON"})", "application/json");
      return;
    }
    std::string prompt = body.value("prompt", std::string());
    {
      std::lock_guard<std::mutex> lock(mu);
      prompts.push_back(prompt);
    }
    const json *rule = match(prompt);
    if (!rule) {
      res.status = 404;
      res.set_content(R"({"error":"no fixture rule matches"})", "application/json");
      return;
    }
    res.status = rule->value("status", 200);
    if (rule->contains("body")) {
      res.set_content((*rule)["body"].get<std::string>(), "application/json");
      return;
    }
    json top = rule->value("top_logprobs", json::object());
    std::string text = top.empty() ? "" : top.begin().key();
    json reply = {{"object", "text_completion"},
                  {"choices",
                   json::array({{{"text", text},
                                 {"index", 0},
                                 {"logprobs", {{"tokens", json::array({text})},
                                               {"token_logprobs", json::array()},
                                               {"top_logprobs", json::array({top})}}},
                                 {"finish_reason", "length"}}})}};
    res.set_content(reply.dump(), "application/json");
  }
};

MockCompletionServer::MockCompletionServer(std::string fixture_json) : impl_(new Impl) {
  try {
    impl_->fixture = json::parse(fixture_json);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("mock fixture: ") + e.what());
  }
  if (!impl_->fixture.is_object())
    throw ConfigError("mock fixture must be a JSON object");
  impl_->server.Post(".*", [this](const httplib::Request &req, httplib::Response &res) {
    impl_->handle(req, res);
  });
}

MockCompletionServer::~MockCompletionServer() { stop(); }

int MockCompletionServer::start(const std::string &host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0)
    throw TransportError("mock completion server cannot bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void MockCompletionServer::listen_blocking(const std::string &host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port))
    throw TransportError("mock completion server cannot listen on " + host + ":" +
                         std::to_string(port));
}

void MockCompletionServer::stop() {
  if (!impl_)
    return;
  impl_->server.stop();
  if (impl_->thread.joinable())
    impl_->thread.join();
}

std::string MockCompletionServer::endpoint() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port) + "/v1/completions";
}

std::vector<std::string> MockCompletionServer::prompts() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->prompts;
}

} // namespace nlflow::llm
