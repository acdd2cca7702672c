// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/llm.hpp"

#include <cmath>

using namespace nlflow;
using namespace nlflow::llm;
using test::make_flow;

namespace {

bool ends_with(const std::string &s, const std::string &tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

std::vector<LabeledFlow> cmd_pool(std::size_t n) {
  std::vector<LabeledFlow> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({make_flow("arg" + std::to_string(i), SinkType::CmdInj,
                             "fn" + std::to_string(i), std::nullopt,
                             static_cast<std::int64_t>(10 + 3 * i)),
                   i % 3 == 0 ? Label::Unexpected : Label::Expected});
  return out;
}

const char *kFixture = R"fx({
  "rules": [
    {"contains": "(hot)", "top_logprobs": {" unexpected": -0.1, " expected": -2.0}},
    {"contains": "(tie)", "top_logprobs": {" unexpected": -0.5, " expected": -0.5}},
    {"contains": "(boom)", "status": 500, "body": "server exploded"},
    {"contains": "(junk)", "body": "not json"}
  ],
  "default": {"top_logprobs": {" expected": -0.2, " unexpected": -3.0}}
})fx";

} // namespace

TEST_CASE("word pairs") {
  CHECK(word_pair(QueryFamily::Integrity).unexpected == "unexpected");
  CHECK(word_pair(QueryFamily::Confidentiality).unexpected == "sensitive");
  CHECK(word_pair(QueryFamily::Confidentiality).expected == "insensitive");
}

TEST_CASE("integrity blocks") {
  auto f = make_flow("cmd", SinkType::CmdInj, std::string("run"));
  auto ex = integrity_block(f, Label::Expected);
  CHECK(ex.rfind("function run(cmd)\n", 0) == 0);
  CHECK(ends_with(ex, "which is expected"));
  auto q = integrity_block(f, std::nullopt);
  CHECK(ends_with(q, "which is"));
  CHECK(q.find("CommandInjection") != std::string::npos);

  auto doc = make_flow("cmd", SinkType::CmdInj, std::string("run"), std::string("Runs cmd."));
  CHECK(integrity_block(doc, Label::Unexpected).find("Runs cmd.") < ex.size());
}

TEST_CASE("logging blocks") {
  auto f = make_flow("password", SinkType::Logging);
  auto ex = logging_block(f, Label::Unexpected);
  CHECK(ends_with(ex, "sensitive data"));
  CHECK(ex.find("console.log(password)") != std::string::npos);
  auto q = logging_block(f, std::nullopt);
  CHECK(ends_with(q, "exposes"));
  FlowRecord unnamed = f;
  unnamed.source_name.clear();
  CHECK_THROWS_AS(logging_block(unnamed, Label::Expected), ValidationError);
}

TEST_CASE("prompt preconditions") {
  auto pool = cmd_pool(12);
  auto query = make_flow("name", SinkType::CmdInj, std::string("locale"), std::nullopt, 900);
  std::vector<LabeledFlow> nine(pool.begin(), pool.begin() + 9);
  CHECK_THROWS_AS(build_integrity_prompt(nine, query), ConfigError);
  CHECK_NOTHROW(build_integrity_prompt(pool, query));

  auto with_query = pool;
  with_query[3] = {query, Label::Unexpected};
  CHECK_THROWS_AS(build_integrity_prompt(with_query, query), ValidationError);

  auto mixed = pool;
  mixed[1].flow.sink_type = SinkType::XSS;
  CHECK_THROWS_AS(build_integrity_prompt(mixed, query), ValidationError);
}

TEST_CASE("prompts are pure and end at the blank word") {
  auto pool = cmd_pool(12);
  auto query = make_flow("name", SinkType::CmdInj, std::string("locale"), std::nullopt, 900);
  auto a = build_prompt(pool, query, 10);
  CHECK(a == build_prompt(pool, query, 10));
  CHECK(ends_with(a, "which is"));
  CHECK(a.find("function locale(name)") == a.rfind("function locale(name)"));
  CHECK(a.find("fn10") == std::string::npos);
}

TEST_CASE("example draws") {
  auto pool = cmd_pool(15);
  pool.push_back({make_flow("html", SinkType::XSS, std::string("page")), Label::Expected});
  auto query = pool[4].flow;
  auto a = draw_examples(pool, query, 10, 42);
  auto b = draw_examples(pool, query, 10, 42);
  REQUIRE(a.size() == 10);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].flow.id == b[i].flow.id);
    CHECK(a[i].flow.id != query.id);
    CHECK(a[i].flow.sink_type == SinkType::CmdInj);
    ids.insert(a[i].flow.id);
  }
  CHECK(ids.size() == 10);
  CHECK_THROWS_AS(draw_examples(pool, query, 15, 42), ConfigError);
  CHECK(per_flow_seed(1, "abc") != per_flow_seed(2, "abc"));
}

TEST_CASE("request bodies") {
  PromptConfig c;
  auto j = nlohmann::json::parse(request_body("hello", c));
  CHECK(j["prompt"] == "hello");
  CHECK(j["max_tokens"] == 1);
  CHECK(j["temperature"] == 0.0);
  CHECK(j["frequency_penalty"] == 0.0);
  CHECK(j["presence_penalty"] == 0.0);
  CHECK(c.shots == 10);
}

TEST_CASE("likelihood rule") {
  auto pair = word_pair(QueryFamily::Integrity);
  auto v = decide({{" unexpected", -0.1}, {" expected", -2.0}}, pair);
  CHECK(v.decision == Label::Unexpected);
  CHECK(v.score == doctest::Approx(std::exp(-0.1) / (std::exp(-0.1) + std::exp(-2.0))));
  auto tie = decide({{" unexpected", -0.7}, {" expected", -0.7}}, pair);
  CHECK(tie.decision == Label::Expected);
  CHECK(tie.score == doctest::Approx(0.5));
  auto one = decide({{" Unexpected", -1.0}, {" foo", -0.1}}, pair);
  CHECK(one.decision == Label::Unexpected);
  CHECK(one.score == 1);
  CHECK_THROWS_AS(decide({{" foo", -0.1}}, pair, "raw"), ProtocolError);
  try {
    decide({}, pair, "raw body");
  } catch (const ProtocolError &e) {
    CHECK(e.payload() == "raw body");
  }
}

TEST_CASE("parsing completion responses") {
  auto lp = parse_top_logprobs(
      R"({"choices":[{"text":" x","logprobs":{"top_logprobs":[{" a":-1.5," b":-0.25}]}}]})");
  CHECK(lp.size() == 2);
  CHECK(lp.at(" b") == -0.25);
  CHECK_THROWS_AS(parse_top_logprobs("[]"), ProtocolError);
  CHECK_THROWS_AS(parse_top_logprobs("garbage"), ProtocolError);
}

TEST_CASE("classification through the mock server") {
  MockCompletionServer server(kFixture);
  server.start();
  PromptConfig c;
  c.endpoint = server.endpoint();
  c.timeout_seconds = 5;
  HttpCompletionClient client;
  auto pair = word_pair(QueryFamily::Integrity);

  CHECK(classify_via_completion(client, c, "function f(hot)", pair).decision == Label::Unexpected);
  CHECK(classify_via_completion(client, c, "function f(tie)", pair).decision == Label::Expected);
  CHECK(classify_via_completion(client, c, "function f(cold)", pair).decision == Label::Expected);
  CHECK_THROWS_AS(classify_via_completion(client, c, "function f(boom)", pair), TransportError);
  CHECK_THROWS_AS(classify_via_completion(client, c, "function f(junk)", pair), ProtocolError);

  auto pool = cmd_pool(12);
  auto query = make_flow("hot", SinkType::CmdInj, std::string("go"), std::nullopt, 500);
  c.shots = 3;
  auto v = classify_flow(client, c, pool, query);
  CHECK(v.decision == Label::Unexpected);
  auto prompts = server.prompts();
  REQUIRE(!prompts.empty());
  auto drawn = draw_examples(pool, query, 3, per_flow_seed(c.seed, query.id));
  CHECK(prompts.back() == build_prompt(drawn, query, 3));
  server.stop();
}

TEST_CASE("an unreachable endpoint is a transport error") {
  PromptConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/completions";
  c.timeout_seconds = 1;
  HttpCompletionClient client;
  CHECK_THROWS_AS(client.complete("x", c), TransportError);
}

TEST_CASE("artifacts round-trip") {
  LlmArtifact a;
  a.query = QueryFamily::Integrity;
  a.config.shots = 4;
  a.config.seed = 17;
  a.pool = cmd_pool(5);
  auto b = parse_artifact(serialize(a));
  CHECK(b.config.shots == 4);
  CHECK(b.config.seed == 17);
  REQUIRE(b.pool.size() == 5);
  CHECK(b.pool[2].flow == a.pool[2].flow);
  CHECK(b.pool[3].label == a.pool[3].label);
  CHECK(serialize(b) == serialize(a));
  CHECK_THROWS_AS(parse_artifact("{}"), ModelError);
}
