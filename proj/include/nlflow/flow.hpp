// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flow data model shared by the analysis, learning and evaluation layers.
// A flow is a (source, sink type) pair extracted by the taint engine and
// annotated with the natural-language context of its source.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlflow {

enum class SinkType { CmdInj, CodeInj, XSS, PathTrav, Logging, None };

enum class SourceKind { ApiParam, ParamProperty, LoggedVar };

enum class Label { Expected, Unexpected };

/// Integrity queries track API parameters into injection sinks;
/// the confidentiality query tracks variables into logging calls.
enum class QueryFamily { Integrity, Confidentiality };

enum class ModelKind { Binary, SinkPrediction, Novelty, Llm, Frequency, Regex };

std::string_view to_string(SinkType t);
std::string_view to_string(SourceKind k);
std::string_view to_string(Label l);
std::string_view to_string(QueryFamily q);
std::string_view to_string(ModelKind m);

SinkType parse_sink_type(std::string_view text);
SourceKind parse_source_kind(std::string_view text);
Label parse_label(std::string_view text);
QueryFamily parse_query_family(std::string_view text);
ModelKind parse_model_kind(std::string_view text);

/// The four injection sinks, in class-index order.
inline constexpr SinkType kIntegritySinks[] = {SinkType::CmdInj, SinkType::CodeInj,
                                               SinkType::XSS, SinkType::PathTrav};

bool is_integrity_sink(SinkType t);

/// Minimum source-name length (in Unicode scalar values) kept by the
/// corpus filter.
inline constexpr std::size_t kMinSourceNameLength = 2;

struct FlowRecord {
  std::string id;
  std::string project;
  std::string file;
  std::int64_t line = 1;
  SourceKind source_kind = SourceKind::ApiParam;
  std::string source_name;
  std::optional<std::string> function_name;
  std::optional<std::string> doc_comment;
  SinkType sink_type = SinkType::None;
  std::optional<std::int64_t> sink_line;

  QueryFamily family() const {
    return source_kind == SourceKind::LoggedVar ? QueryFamily::Confidentiality
                                                : QueryFamily::Integrity;
  }

  bool operator==(const FlowRecord &) const = default;
};

struct LabeledFlow {
  FlowRecord flow;
  Label label = Label::Expected;
};

struct Verdict {
  Label decision = Label::Expected;
  /// Higher means more report-worthy. Scale is model specific.
  double score = 0.0;
  ModelKind model_kind = ModelKind::Binary;
  /// Raw corpus count, kept by the frequency baseline.
  std::optional<std::int64_t> raw_count;
};

/// Stable identity over (project, file, line, source_name, sink_type, sink_line).
std::string compute_flow_id(const FlowRecord &r);

/// Throws ValidationError when `r` breaks a record invariant.
void validate(const FlowRecord &r);

/// Canonical single-line JSON (schema field order, no whitespace).
std::string serialize(const FlowRecord &r);
std::string serialize_flows(const std::vector<FlowRecord> &flows);

/// Parses line-delimited records. Blank lines are skipped. Throws
/// ParseError for malformed lines and ValidationError for invariant
/// violations or duplicate ids; both carry the offending line number.
std::vector<FlowRecord> parse_flows(std::istream &in);
std::vector<FlowRecord> parse_flows(std::string_view text);
std::vector<FlowRecord> load_flows(const std::string &path);

/// Keeps records whose source name has at least two characters.
std::vector<FlowRecord> filter_short_names(const std::vector<FlowRecord> &flows);

/// flow_id -> label. Duplicate flow ids raise ValidationError.
std::map<std::string, Label> parse_labels(std::istream &in);
std::map<std::string, Label> parse_labels(std::string_view text);
std::map<std::string, Label> load_labels(const std::string &path);
std::string serialize_labels(const std::vector<LabeledFlow> &labeled);

/// Pairs flows with their labels, preserving flow order. Flows without a
/// label are dropped; a label naming an unknown flow raises ValidationError.
std::vector<LabeledFlow> join_labels(const std::vector<FlowRecord> &flows,
                                     const std::map<std::string, Label> &labels);

/// Flows whose id has no label (the unlabeled corpus).
std::vector<FlowRecord> unlabeled(const std::vector<FlowRecord> &flows,
                                  const std::map<std::string, Label> &labels);

} // namespace nlflow
