// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/flow.hpp"

#include "nlflow/common.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace nlflow {

using ojson = nlohmann::ordered_json;

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<Enum, std::string_view> (&table)[N],
                const char *what) {
  for (const auto &[value, name] : table)
    if (name == text)
      return value;
  throw ValidationError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::pair<Enum, std::string_view> (&table)[N]) {
  for (const auto &[value, name] : table)
    if (value == v)
      return name;
  return "?";
}

constexpr std::pair<SinkType, std::string_view> kSinkNames[] = {
    {SinkType::CmdInj, "CmdInj"},     {SinkType::CodeInj, "CodeInj"}, {SinkType::XSS, "XSS"},
    {SinkType::PathTrav, "PathTrav"}, {SinkType::Logging, "Logging"}, {SinkType::None, "None"}};

constexpr std::pair<SourceKind, std::string_view> kSourceNames[] = {
    {SourceKind::ApiParam, "ApiParam"},
    {SourceKind::ParamProperty, "ParamProperty"},
    {SourceKind::LoggedVar, "LoggedVar"}};

constexpr std::pair<Label, std::string_view> kLabelNames[] = {{Label::Expected, "expected"},
                                                              {Label::Unexpected, "unexpected"}};

constexpr std::pair<QueryFamily, std::string_view> kQueryNames[] = {
    {QueryFamily::Integrity, "integrity"}, {QueryFamily::Confidentiality, "confidentiality"}};

constexpr std::pair<ModelKind, std::string_view> kModelNames[] = {
    {ModelKind::Binary, "binary"},       {ModelKind::SinkPrediction, "sink"},
    {ModelKind::Novelty, "novelty"},     {ModelKind::Llm, "llm"},
    {ModelKind::Frequency, "frequency"}, {ModelKind::Regex, "regex"}};

const std::set<std::string> kFlowFields = {"id",          "project",       "file",
                                           "line",        "source_kind",   "source_name",
                                           "function_name", "doc_comment", "sink_type",
                                           "sink_line"};

std::string require_string(const ojson &obj, const char *key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(std::string("missing field '") + key + "'");
  if (!it->is_string())
    throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const ojson &obj, const char *key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    return std::nullopt;
  if (!it->is_string())
    throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::int64_t positive_int(const ojson &value, const char *key) {
  if (!value.is_number_integer())
    throw ValidationError(std::string("field '") + key + "' must be an integer");
  auto v = value.get<std::int64_t>();
  if (v < 1)
    throw ValidationError(std::string("field '") + key + "' must be >= 1");
  return v;
}

FlowRecord record_from_json(const ojson &obj) {
  if (!obj.is_object())
    throw ValidationError("record must be a JSON object");
  for (const auto &item : obj.items())
    if (!kFlowFields.contains(item.key()))
      throw ValidationError("unknown field '" + item.key() + "'");
  FlowRecord r;
  r.id = require_string(obj, "id");
  r.project = require_string(obj, "project");
  r.file = require_string(obj, "file");
  if (!obj.contains("line"))
    throw ValidationError("missing field 'line'");
  r.line = positive_int(obj.at("line"), "line");
  r.source_kind = parse_source_kind(require_string(obj, "source_kind"));
  r.source_name = require_string(obj, "source_name");
  r.function_name = optional_string(obj, "function_name");
  r.doc_comment = optional_string(obj, "doc_comment");
  r.sink_type = parse_sink_type(require_string(obj, "sink_type"));
  if (auto it = obj.find("sink_line"); it != obj.end() && !it->is_null())
    r.sink_line = positive_int(*it, "sink_line");
  return r;
}

template <typename Fn> void for_each_line(std::istream &in, Fn &&fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    fn(line, number);
  }
}

ojson parse_json_line(const std::string &line, std::size_t number) {
  try {
    return ojson::parse(line);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), number, e.byte);
  }
}

} // namespace

std::string_view to_string(SinkType t) { return enum_name(t, kSinkNames); }
std::string_view to_string(SourceKind k) { return enum_name(k, kSourceNames); }
std::string_view to_string(Label l) { return enum_name(l, kLabelNames); }
std::string_view to_string(QueryFamily q) { return enum_name(q, kQueryNames); }
std::string_view to_string(ModelKind m) { return enum_name(m, kModelNames); }

SinkType parse_sink_type(std::string_view text) { return parse_enum(text, kSinkNames, "sink type"); }
SourceKind parse_source_kind(std::string_view text) {
  return parse_enum(text, kSourceNames, "source kind");
}
Label parse_label(std::string_view text) { return parse_enum(text, kLabelNames, "label"); }
QueryFamily parse_query_family(std::string_view text) {
  return parse_enum(text, kQueryNames, "query family");
}
ModelKind parse_model_kind(std::string_view text) {
  return parse_enum(text, kModelNames, "model kind");
}

bool is_integrity_sink(SinkType t) {
  return t == SinkType::CmdInj || t == SinkType::CodeInj || t == SinkType::XSS ||
         t == SinkType::PathTrav;
}

std::string compute_flow_id(const FlowRecord &r) {
  std::string key;
  key += r.project;
  key += '\x1f';
  key += r.file;
  key += '\x1f';
  key += std::to_string(r.line);
  key += '\x1f';
  key += r.source_name;
  key += '\x1f';
  key += to_string(r.sink_type);
  key += '\x1f';
  key += r.sink_line ? std::to_string(*r.sink_line) : std::string("-");
  return hex64(fnv1a(key));
}

void validate(const FlowRecord &r) {
  if (r.id.empty())
    throw ValidationError("empty id");
  if (r.line < 1)
    throw ValidationError("line must be >= 1");
  if (utf8_length(r.source_name) < kMinSourceNameLength)
    throw ValidationError("source_name '" + r.source_name +
                          "' is shorter than two characters");
  if (r.source_kind == SourceKind::LoggedVar) {
    if (r.sink_type != SinkType::Logging && r.sink_type != SinkType::None)
      throw ValidationError("LoggedVar records must have sink_type Logging or None");
  } else {
    if (r.sink_type == SinkType::Logging)
      throw ValidationError("parameter sources cannot flow to a Logging sink");
    if (!r.function_name || r.function_name->empty())
      throw ValidationError("integrity records require function_name");
  }
  if (r.sink_type == SinkType::None) {
    if (r.sink_line)
      throw ValidationError("sink_line must be absent when sink_type is None");
  } else if (!r.sink_line) {
    throw ValidationError("sink_line is required when sink_type is not None");
  } else if (*r.sink_line < 1) {
    throw ValidationError("sink_line must be >= 1");
  }
}

std::string serialize(const FlowRecord &r) {
  ojson obj;
  obj["id"] = r.id;
  obj["project"] = r.project;
  obj["file"] = r.file;
  obj["line"] = r.line;
  obj["source_kind"] = to_string(r.source_kind);
  obj["source_name"] = r.source_name;
  if (r.function_name)
    obj["function_name"] = *r.function_name;
  if (r.doc_comment)
    obj["doc_comment"] = *r.doc_comment;
  obj["sink_type"] = to_string(r.sink_type);
  if (r.sink_line)
    obj["sink_line"] = *r.sink_line;
  return obj.dump();
}

std::string serialize_flows(const std::vector<FlowRecord> &flows) {
  std::string out;
  for (const auto &f : flows) {
    out += serialize(f);
    out += '\n';
  }
  return out;
}

std::vector<FlowRecord> parse_flows(std::istream &in) {
  std::vector<FlowRecord> flows;
  std::set<std::string> seen;
  for_each_line(in, [&](const std::string &line, std::size_t number) {
    auto obj = parse_json_line(line, number);
    FlowRecord r;
    try {
      r = record_from_json(obj);
      validate(r);
    } catch (const ValidationError &e) {
      throw ValidationError("line " + std::to_string(number) + ": " + e.what());
    }
    if (!seen.insert(r.id).second)
      throw ValidationError("line " + std::to_string(number) + ": duplicate id '" + r.id + "'");
    flows.push_back(std::move(r));
  });
  return flows;
}

std::vector<FlowRecord> parse_flows(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_flows(in);
}

std::vector<FlowRecord> load_flows(const std::string &path) {
  return parse_flows(std::string_view(read_file(path)));
}

std::vector<FlowRecord> filter_short_names(const std::vector<FlowRecord> &flows) {
  std::vector<FlowRecord> kept;
  kept.reserve(flows.size());
  for (const auto &f : flows)
    if (utf8_length(f.source_name) >= kMinSourceNameLength)
      kept.push_back(f);
  return kept;
}

std::map<std::string, Label> parse_labels(std::istream &in) {
  std::map<std::string, Label> labels;
  for_each_line(in, [&](const std::string &line, std::size_t number) {
    auto obj = parse_json_line(line, number);
    try {
      if (!obj.is_object())
        throw ValidationError("label must be a JSON object");
      auto id = require_string(obj, "flow_id");
      auto label = parse_label(require_string(obj, "label"));
      if (!labels.emplace(id, label).second)
        throw ValidationError("duplicate label for flow '" + id + "'");
    } catch (const ValidationError &e) {
      throw ValidationError("line " + std::to_string(number) + ": " + e.what());
    }
  });
  return labels;
}

std::map<std::string, Label> parse_labels(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_labels(in);
}

std::map<std::string, Label> load_labels(const std::string &path) {
  return parse_labels(std::string_view(read_file(path)));
}

std::string serialize_labels(const std::vector<LabeledFlow> &labeled) {
  std::string out;
  for (const auto &lf : labeled) {
    ojson obj;
    obj["flow_id"] = lf.flow.id;
    obj["label"] = to_string(lf.label);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledFlow> join_labels(const std::vector<FlowRecord> &flows,
                                     const std::map<std::string, Label> &labels) {
  std::set<std::string> ids;
  for (const auto &f : flows)
    ids.insert(f.id);
  for (const auto &[id, label] : labels)
    if (!ids.contains(id))
      throw ValidationError("label refers to unknown flow '" + id + "'");
  std::vector<LabeledFlow> out;
  for (const auto &f : flows)
    if (auto it = labels.find(f.id); it != labels.end())
      out.push_back({f, it->second});
  return out;
}

std::vector<FlowRecord> unlabeled(const std::vector<FlowRecord> &flows,
                                  const std::map<std::string, Label> &labels) {
  std::vector<FlowRecord> out;
  for (const auto &f : flows)
    if (!labels.contains(f.id))
      out.push_back(f);
  return out;
}

} // namespace nlflow
