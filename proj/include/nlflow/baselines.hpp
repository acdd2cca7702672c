// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nlflow/flow.hpp"

#include <map>
#include <regex>
#include <string>
#include <utility>
#include <vector>

namespace nlflow::baselines {

/// Exact (name, sink type) tallies over a corpus.
struct FrequencyTable {
  std::map<std::pair<std::string, SinkType>, std::size_t> counts;
  std::map<std::string, std::size_t> totals;

  std::size_t count(const std::string &name, SinkType sink) const;
  bool operator==(const FrequencyTable &) const = default;
};

FrequencyTable build_frequency_table(const std::vector<FlowRecord> &flows);

/// score = 1 / (1 + count); raw_count carries the count itself. Throws
/// ValidationError for Logging or None flows.
Verdict frequency_unexpectedness(const FrequencyTable &table, const FlowRecord &flow,
                                 std::optional<double> threshold = std::nullopt);

std::string serialize(const FrequencyTable &table);
FrequencyTable parse_frequency_table(std::string_view text);

/// Sensitive-name patterns plus a filter for names that look encrypted or
/// hashed. ECMAScript syntax, matched case-insensitively anywhere in the name.
class RegexClassifier {
public:
  RegexClassifier(); // repository defaults
  RegexClassifier(std::vector<std::string> sensitive, std::vector<std::string> filter);

  static std::vector<std::string> default_sensitive();
  static std::vector<std::string> default_filter();

  bool is_sensitive(const std::string &name) const;
  /// score 1 and Unexpected for a sensitive name, else score 0 and Expected.
  Verdict classify(const std::string &name) const;

  const std::vector<std::string> &sensitive_patterns() const { return sensitive_src_; }
  const std::vector<std::string> &filter_patterns() const { return filter_src_; }

private:
  std::vector<std::string> sensitive_src_, filter_src_;
  std::vector<std::regex> sensitive_, filter_;
};

/// {"sensitive": [...], "filter": [...]}; either key may be omitted to keep
/// the default. Invalid patterns raise ConfigError.
RegexClassifier parse_patterns(std::string_view json_text);
RegexClassifier load_patterns(const std::string &path);
std::string serialize_patterns(const RegexClassifier &c);

} // namespace nlflow::baselines
