// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/baselines.hpp"

#include "nlflow/common.hpp"

#include <json.hpp>

namespace nlflow::baselines {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t FrequencyTable::count(const std::string &name, SinkType sink) const {
  auto it = counts.find({name, sink});
  return it == counts.end() ? 0 : it->second;
}

FrequencyTable build_frequency_table(const std::vector<FlowRecord> &flows) {
  FrequencyTable t;
  for (const auto &f : flows) {
    ++t.counts[{f.source_name, f.sink_type}];
    ++t.totals[f.source_name];
  }
  return t;
}

Verdict frequency_unexpectedness(const FrequencyTable &table, const FlowRecord &flow,
                                 std::optional<double> threshold) {
  if (!is_integrity_sink(flow.sink_type))
    throw ValidationError("frequency counting only applies to integrity sinks, not " +
                          std::string(to_string(flow.sink_type)));
  std::size_t n = table.count(flow.source_name, flow.sink_type);
  Verdict v;
  v.model_kind = ModelKind::Frequency;
  v.raw_count = static_cast<std::int64_t>(n);
  v.score = 1.0 / (1.0 + static_cast<double>(n));
  double t = threshold.value_or(1.0);
  v.decision = v.score >= t ? Label::Unexpected : Label::Expected;
  return v;
}

std::string serialize(const FrequencyTable &table) {
  ordered_json j;
  j["version"] = 1;
  j["kind"] = "frequency";
  ordered_json counts = ordered_json::array();
  for (const auto &[key, n] : table.counts)
    counts.push_back({{"source_name", key.first}, {"sink_type", to_string(key.second)}, {"count", n}});
  j["counts"] = counts;
  return j.dump() + "\n";
}

FrequencyTable parse_frequency_table(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ModelError(std::string("corrupt frequency table: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version"))
    throw ModelError("corrupt frequency table: missing version");
  if (j["version"] != 1)
    throw VersionError("unsupported frequency table version " + j["version"].dump());
  FrequencyTable t;
  try {
    for (const auto &e : j.at("counts")) {
      std::string name = e.at("source_name").get<std::string>();
      SinkType s = parse_sink_type(e.at("sink_type").get<std::string>());
      std::size_t n = e.at("count").get<std::size_t>();
      t.counts[{name, s}] = n;
      t.totals[name] += n;
    }
  } catch (const json::exception &e) {
    throw ModelError(std::string("corrupt frequency table: ") + e.what());
  } catch (const ValidationError &e) {
    throw ModelError(std::string("corrupt frequency table: ") + e.what());
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::regex> compile(const std::vector<std::string> &patterns) {
  std::vector<std::regex> out;
  for (const auto &p : patterns) {
    try {
      out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error &e) {
      throw ConfigError("invalid pattern \"" + p + "\": " + e.what());
    }
  }
  return out;
}

bool any_match(const std::vector<std::regex> &res, const std::string &name) {
  for (const auto &re : res)
    if (std::regex_search(name, re))
      return true;
  return false;
}

} // namespace

std::vector<std::string> RegexClassifier::default_sensitive() {
  return {"pass(word|code|phrase)?", "secret", "auth.*key", "token", "credential"};
}

std::vector<std::string> RegexClassifier::default_filter() { return {"hash|crypt|encod|digest"}; }

RegexClassifier::RegexClassifier() : RegexClassifier(default_sensitive(), default_filter()) {}

RegexClassifier::RegexClassifier(std::vector<std::string> sensitive,
                                 std::vector<std::string> filter)
    : sensitive_src_(std::move(sensitive)), filter_src_(std::move(filter)),
      sensitive_(compile(sensitive_src_)), filter_(compile(filter_src_)) {}

bool RegexClassifier::is_sensitive(const std::string &name) const {
  return any_match(sensitive_, name) && !any_match(filter_, name);
}

Verdict RegexClassifier::classify(const std::string &name) const {
  Verdict v;
  v.model_kind = ModelKind::Regex;
  bool s = is_sensitive(name);
  v.score = s ? 1.0 : 0.0;
  v.decision = s ? Label::Unexpected : Label::Expected;
  return v;
}

RegexClassifier parse_patterns(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("pattern file: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("pattern file must be an object with \"sensitive\" and \"filter\" lists");
  auto list = [&](const char *key, std::vector<std::string> fallback) {
    if (!j.contains(key))
      return fallback;
    const auto &arr = j.at(key);
    if (!arr.is_array())
      throw ConfigError(std::string("pattern file: \"") + key + "\" must be a list of strings");
    std::vector<std::string> out;
    for (const auto &p : arr) {
      if (!p.is_string())
        throw ConfigError(std::string("pattern file: \"") + key + "\" must be a list of strings");
      out.push_back(p.get<std::string>());
    }
    return out;
  };
  for (const auto &[key, _] : j.items())
    if (key != "sensitive" && key != "filter")
      throw ConfigError("pattern file: unknown key \"" + key + "\"");
  return RegexClassifier(list("sensitive", RegexClassifier::default_sensitive()),
                         list("filter", RegexClassifier::default_filter()));
}

RegexClassifier load_patterns(const std::string &path) { return parse_patterns(read_file(path)); }

std::string serialize_patterns(const RegexClassifier &c) {
  ordered_json j;
  j["sensitive"] = c.sensitive_patterns();
  j["filter"] = c.filter_patterns();
  return j.dump(2) + "\n";
}

} // namespace nlflow::baselines
