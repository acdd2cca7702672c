// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Few-shot prompts for a text-completion service and the likelihood rule
// that turns the completion into a verdict.

#pragma once

#include "nlflow/common.hpp"
#include "nlflow/flow.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace nlflow::llm {

/// Network failure, timeout or non-2xx status.
class TransportError : public Error {
public:
  using Error::Error;
};

/// A response without the requested likelihoods. `payload` is the raw body.
class ProtocolError : public Error {
public:
  ProtocolError(const std::string &what, std::string payload)
      : Error(what), payload_(std::move(payload)) {}
  const std::string &payload() const { return payload_; }

private:
  std::string payload_;
};

struct PromptConfig {
  std::size_t shots = 10;
  double temperature = 0;
  double frequency_penalty = 0;
  double presence_penalty = 0;
  std::string endpoint = "http://127.0.0.1:8089/v1/completions";
  std::string api_key; // sent as a bearer token when non-empty
  double timeout_seconds = 30;
  std::size_t max_in_flight = 1;
  std::uint64_t seed = 0;
};

/// Environment variable holding the completion-service API key.
inline constexpr const char *kApiKeyEnv = "NLFLOW_API_KEY";

struct WordPair {
  std::string expected;   // completion meaning "fine"
  std::string unexpected; // completion meaning "report it"
};

WordPair word_pair(QueryFamily family);

/// Query name and explanation used in integrity sentences.
std::string_view sink_query_name(SinkType t);
std::string_view sink_explanation(SinkType t);

/// One example or query block. `completion` is omitted for the query.
std::string integrity_block(const FlowRecord &flow, const std::optional<Label> &completion);
std::string logging_block(const FlowRecord &flow, const std::optional<Label> &completion);

/// Examples, then the query. Needs at least `shots` examples of the query's
/// sink type, none of which is the query itself; the first `shots` are used.
std::string build_integrity_prompt(const std::vector<LabeledFlow> &examples,
                                   const FlowRecord &query, std::size_t shots = 10);
std::string build_logging_prompt(const std::vector<LabeledFlow> &examples,
                                 const FlowRecord &query, std::size_t shots = 10);
std::string build_prompt(const std::vector<LabeledFlow> &examples, const FlowRecord &query,
                         std::size_t shots = 10);

/// Uniform draw without replacement of `shots` same-sink examples other than
/// the query, from an RNG seeded with `seed`.
std::vector<LabeledFlow> draw_examples(const std::vector<LabeledFlow> &pool,
                                       const FlowRecord &query, std::size_t shots,
                                       std::uint64_t seed);

/// Seed used to draw the examples of one flow in direct evaluation.
std::uint64_t per_flow_seed(std::uint64_t base, const std::string &flow_id);

std::string request_body(const std::string &prompt, const PromptConfig &config);

/// token -> log-probability from choices[0].logprobs.top_logprobs[0].
std::map<std::string, double> parse_top_logprobs(const std::string &body);

/// Compares the first-token likelihoods of both words (tokens are trimmed
/// and lowercased). A missing word counts as log-probability −∞; both
/// missing is a ProtocolError. Ties go to Expected. score = normalized
/// probability of the unexpected word.
Verdict decide(const std::map<std::string, double> &logprobs, const WordPair &pair,
               const std::string &raw_payload = {});

class CompletionClient {
public:
  virtual ~CompletionClient() = default;
  /// Raw response body. Throws TransportError.
  virtual std::string complete(const std::string &prompt, const PromptConfig &config) = 0;
};

/// Plain-HTTP client for the request shape above.
class HttpCompletionClient : public CompletionClient {
public:
  std::string complete(const std::string &prompt, const PromptConfig &config) override;
};

Verdict classify_via_completion(CompletionClient &client, const PromptConfig &config,
                                const std::string &prompt, const WordPair &pair);

/// Classifies `query` with examples drawn from `pool` (seeded per flow).
Verdict classify_flow(CompletionClient &client, const PromptConfig &config,
                      const std::vector<LabeledFlow> &pool, const FlowRecord &query);

/// Stored "model" for the CLI: configuration plus the labeled example pool.
struct LlmArtifact {
  QueryFamily query = QueryFamily::Integrity;
  PromptConfig config;
  std::vector<LabeledFlow> pool;
};

std::string serialize(const LlmArtifact &a);
LlmArtifact parse_artifact(std::string_view text);

// ---------------------------------------------------------------------------
// Scripted stand-in for a completion service.

/// Fixture: {"rules": [{"contains": s, "status": n, "top_logprobs": {...},
/// "body": raw}], "default": {...}}. A rule fires when its `contains` text
/// occurs in the query section (the text after the last blank line) of the
/// prompt; the first firing rule wins. `body`, when given, is sent verbatim.
class MockCompletionServer {
public:
  explicit MockCompletionServer(std::string fixture_json);
  ~MockCompletionServer();
  MockCompletionServer(const MockCompletionServer &) = delete;
  MockCompletionServer &operator=(const MockCompletionServer &) = delete;

  /// Binds host:port (0 = any free port) and serves in a background thread.
  /// Returns the bound port.
  int start(const std::string &host = "127.0.0.1", int port = 0);
  /// Serves in the calling thread until stop() is called elsewhere.
  void listen_blocking(const std::string &host, int port);
  void stop();

  std::string endpoint() const;
  std::vector<std::string> prompts() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace nlflow::llm
