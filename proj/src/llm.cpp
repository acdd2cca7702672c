// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/llm.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlflow::llm {

using nlohmann::json;
using nlohmann::ordered_json;

WordPair word_pair(QueryFamily family) {
  if (family == QueryFamily::Integrity)
    return {"expected", "unexpected"};
  return {"insensitive", "sensitive"};
}

std::string_view sink_query_name(SinkType t) {
  switch (t) {
  case SinkType::CmdInj: return "CommandInjection";
  case SinkType::CodeInj: return "CodeInjection";
  case SinkType::XSS: return "ReflectedXss";
  case SinkType::PathTrav: return "TaintedPath";
  default: throw ValidationError("no integrity query for sink type " + std::string(to_string(t)));
  }
}

std::string_view sink_explanation(SinkType t) {
  switch (t) {
  case SinkType::CmdInj: return "uncontrolled data used in a command line";
  case SinkType::CodeInj: return "uncontrolled data interpreted as code";
  case SinkType::XSS: return "uncontrolled data written to an HTTP response";
  case SinkType::PathTrav: return "uncontrolled data used in a path expression";
  default: throw ValidationError("no integrity query for sink type " + std::string(to_string(t)));
  }
}

namespace {

std::string doc_block(const std::string &doc) {
  std::string out = "/**\n";
  std::istringstream lines(doc);
  std::string line;
  while (std::getline(lines, line)) {
    out += line.empty() ? " *" : " * " + line;
    out += "\n";
  }
  return out + " */\n";
}

void require_name(const FlowRecord &flow) {
  if (flow.source_name.empty())
    throw ValidationError("flow " + flow.id + " has no variable name");
}

std::string completion_word(QueryFamily family, Label label) {
  WordPair p = word_pair(family);
  return label == Label::Unexpected ? p.unexpected : p.expected;
}

} // namespace

std::string integrity_block(const FlowRecord &flow, const std::optional<Label> &completion) {
  require_name(flow);
  if (!flow.function_name || flow.function_name->empty())
    throw ValidationError("flow " + flow.id + " has no function name");
  std::string out;
  if (flow.doc_comment)
    out += doc_block(*flow.doc_comment);
  out += "function " + *flow.function_name + "(" + flow.source_name + ")\n";
  out += "// In the above function " + *flow.function_name + ", the parameter " +
         flow.source_name + " flows into the " + std::string(sink_query_name(flow.sink_type)) +
         " sink (" + std::string(sink_explanation(flow.sink_type)) + "), which is";
  if (completion)
    out += " " + completion_word(QueryFamily::Integrity, *completion);
  return out;
}

std::string logging_block(const FlowRecord &flow, const std::optional<Label> &completion) {
  require_name(flow);
  std::string f = flow.function_name && !flow.function_name->empty() ? *flow.function_name : "f";
  std::string out = "function " + f + "(" + flow.source_name + ") {\n  console.log(" +
                    flow.source_name + ");\n}\n";
  out += "// In the above function " + f + ", the parameter " + flow.source_name +
         " is being logged, which likely exposes";
  if (completion)
    out += " " + completion_word(QueryFamily::Confidentiality, *completion) + " data";
  return out;
}

namespace {

std::string assemble(const std::vector<LabeledFlow> &examples, const FlowRecord &query,
                     std::size_t shots, QueryFamily family) {
  if (query.family() != family)
    throw ValidationError("query flow belongs to the other query family");
  if (examples.size() < shots)
    throw ConfigError("prompt needs " + std::to_string(shots) + " examples, got " +
                      std::to_string(examples.size()));
  auto block = family == QueryFamily::Integrity ? integrity_block : logging_block;
  std::string out;
  for (std::size_t i = 0; i < shots; ++i) {
    const LabeledFlow &ex = examples[i];
    if (ex.flow.sink_type != query.sink_type)
      throw ValidationError("example " + ex.flow.id + " has sink type " +
                            std::string(to_string(ex.flow.sink_type)) + ", query has " +
                            std::string(to_string(query.sink_type)));
    if (ex.flow.id == query.id)
      throw ValidationError("the query flow " + query.id + " is among the examples");
    out += block(ex.flow, ex.label);
    out += "\n\n";
  }
  out += block(query, std::nullopt);
  return out;
}

} // namespace

std::string build_integrity_prompt(const std::vector<LabeledFlow> &examples,
                                   const FlowRecord &query, std::size_t shots) {
  if (!is_integrity_sink(query.sink_type))
    throw ValidationError("integrity prompts need an integrity sink, got " +
                          std::string(to_string(query.sink_type)));
  return assemble(examples, query, shots, QueryFamily::Integrity);
}

std::string build_logging_prompt(const std::vector<LabeledFlow> &examples,
                                 const FlowRecord &query, std::size_t shots) {
  if (query.sink_type != SinkType::Logging)
    throw ValidationError("logging prompts need a Logging flow");
  return assemble(examples, query, shots, QueryFamily::Confidentiality);
}

std::string build_prompt(const std::vector<LabeledFlow> &examples, const FlowRecord &query,
                         std::size_t shots) {
  return query.family() == QueryFamily::Integrity ? build_integrity_prompt(examples, query, shots)
                                                  : build_logging_prompt(examples, query, shots);
}

std::vector<LabeledFlow> draw_examples(const std::vector<LabeledFlow> &pool,
                                       const FlowRecord &query, std::size_t shots,
                                       std::uint64_t seed) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].flow.sink_type == query.sink_type && pool[i].flow.id != query.id)
      candidates.push_back(i);
  if (candidates.size() < shots)
    throw ConfigError("only " + std::to_string(candidates.size()) + " labeled " +
                      std::string(to_string(query.sink_type)) + " examples besides the query; " +
                      std::to_string(shots) + " are needed");
  Rng rng(seed);
  rng.shuffle(candidates);
  std::vector<LabeledFlow> out;
  for (std::size_t i = 0; i < shots; ++i)
    out.push_back(pool[candidates[i]]);
  return out;
}

std::uint64_t per_flow_seed(std::uint64_t base, const std::string &flow_id) {
  return fnv1a(flow_id, 0xcbf29ce484222325ULL ^ base);
}

std::string request_body(const std::string &prompt, const PromptConfig &config) {
  ordered_json j;
  j["prompt"] = prompt;
  j["max_tokens"] = 1;
  j["logprobs"] = 2;
  j["temperature"] = config.temperature;
  j["frequency_penalty"] = config.frequency_penalty;
  j["presence_penalty"] = config.presence_penalty;
  return j.dump();
}

std::map<std::string, double> parse_top_logprobs(const std::string &body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error &) {
    throw ProtocolError("completion response is not JSON", body);
  }
  try {
    const auto &top = j.at("choices").at(0).at("logprobs").at("top_logprobs").at(0);
    if (!top.is_object())
      throw ProtocolError("top_logprobs[0] is not an object", body);
    std::map<std::string, double> out;
    for (auto it = top.begin(); it != top.end(); ++it) {
      if (!it.value().is_number())
        throw ProtocolError("log-probability for \"" + it.key() + "\" is not a number", body);
      out[it.key()] = it.value().get<double>();
    }
    return out;
  } catch (const json::exception &) {
    throw ProtocolError("completion response lacks choices[0].logprobs.top_logprobs[0]", body);
  }
}

namespace {

std::string normalize_token(const std::string &t) {
  std::size_t b = t.find_first_not_of(" \t\n\r");
  if (b == std::string::npos)
    return {};
  std::size_t e = t.find_last_not_of(" \t\n\r");
  return to_lower(t.substr(b, e - b + 1));
}

} // namespace

Verdict decide(const std::map<std::string, double> &logprobs, const WordPair &pair,
               const std::string &raw_payload) {
  const double ninf = -std::numeric_limits<double>::infinity();
  double lu = ninf, le = ninf;
  bool found_u = false, found_e = false;
  for (const auto &[token, lp] : logprobs) {
    std::string t = normalize_token(token);
    if (t == pair.unexpected) {
      lu = found_u ? std::max(lu, lp) : lp;
      found_u = true;
    } else if (t == pair.expected) {
      le = found_e ? std::max(le, lp) : lp;
      found_e = true;
    }
  }
  if (!found_u && !found_e)
    throw ProtocolError("neither \"" + pair.expected + "\" nor \"" + pair.unexpected +
                            "\" is among the returned likelihoods",
                        raw_payload);
  Verdict v;
  v.model_kind = ModelKind::Llm;
  v.decision = lu > le ? Label::Unexpected : Label::Expected;
  if (!found_e)
    v.score = 1;
  else if (!found_u)
    v.score = 0;
  else {
    double m = std::max(lu, le);
    double pu = std::exp(lu - m), pe = std::exp(le - m);
    v.score = pu / (pu + pe);
  }
  return v;
}

Verdict classify_via_completion(CompletionClient &client, const PromptConfig &config,
                                const std::string &prompt, const WordPair &pair) {
  std::string body = client.complete(prompt, config);
  return decide(parse_top_logprobs(body), pair, body);
}

Verdict classify_flow(CompletionClient &client, const PromptConfig &config,
                      const std::vector<LabeledFlow> &pool, const FlowRecord &query) {
  auto examples = draw_examples(pool, query, config.shots, per_flow_seed(config.seed, query.id));
  std::string prompt = build_prompt(examples, query, config.shots);
  return classify_via_completion(client, config, prompt, word_pair(query.family()));
}

// ---------------------------------------------------------------------------

std::string serialize(const LlmArtifact &a) {
  ordered_json j;
  j["version"] = 1;
  j["kind"] = "llm";
  j["query"] = to_string(a.query);
  ordered_json c;
  c["shots"] = a.config.shots;
  c["temperature"] = a.config.temperature;
  c["frequency_penalty"] = a.config.frequency_penalty;
  c["presence_penalty"] = a.config.presence_penalty;
  c["endpoint"] = a.config.endpoint;
  c["timeout_seconds"] = a.config.timeout_seconds;
  c["max_in_flight"] = a.config.max_in_flight;
  c["seed"] = a.config.seed;
  j["config"] = c;
  ordered_json pool = ordered_json::array();
  for (const auto &lf : a.pool) {
    ordered_json e;
    e["flow"] = ordered_json::parse(serialize(lf.flow));
    e["label"] = to_string(lf.label);
    pool.push_back(std::move(e));
  }
  j["pool"] = pool;
  return j.dump() + "\n";
}

LlmArtifact parse_artifact(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ModelError(std::string("corrupt LLM artifact: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version"))
    throw ModelError("corrupt LLM artifact: missing version");
  if (j["version"] != 1)
    throw VersionError("unsupported LLM artifact version " + j["version"].dump());
  try {
    if (j.at("kind") != "llm")
      throw ModelError("not an LLM artifact");
    LlmArtifact a;
    a.query = parse_query_family(j.at("query").get<std::string>());
    const auto &c = j.at("config");
    a.config.shots = c.at("shots").get<std::size_t>();
    a.config.temperature = c.at("temperature").get<double>();
    a.config.frequency_penalty = c.at("frequency_penalty").get<double>();
    a.config.presence_penalty = c.at("presence_penalty").get<double>();
    a.config.endpoint = c.at("endpoint").get<std::string>();
    a.config.timeout_seconds = c.value("timeout_seconds", a.config.timeout_seconds);
    a.config.max_in_flight = c.value("max_in_flight", a.config.max_in_flight);
    a.config.seed = c.value("seed", a.config.seed);
    for (const auto &e : j.at("pool")) {
      auto flows = parse_flows(e.at("flow").dump());
      a.pool.push_back({flows.at(0), parse_label(e.at("label").get<std::string>())});
    }
    return a;
  } catch (const json::exception &e) {
    throw ModelError(std::string("corrupt LLM artifact: ") + e.what());
  } catch (const ValidationError &e) {
    throw ModelError(std::string("corrupt LLM artifact: ") + e.what());
  } catch (const ParseError &e) {
    throw ModelError(std::string("corrupt LLM artifact: ") + e.what());
  }
}

} // namespace nlflow::llm
