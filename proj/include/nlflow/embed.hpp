// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Identifier-name and doc-comment features.

#pragma once

#include "nlflow/flow.hpp"

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nlflow {

/// Pre-trained token vectors. Keys are lowercase; every vector has `dim`
/// components.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> entries;

  const std::vector<double> *find(const std::string &token) const;
};

/// Splits an identifier on camelCase boundaries, underscores, hyphens,
/// digits and other non-alphanumerics. "XMLHttpRequest" -> xml, http, request.
std::vector<std::string> subtokenize(std::string_view name);

/// Word-vector text format: "<count> <k>" then "<token> v1 ... vk" per line.
/// Duplicate tokens keep the last vector; a warning is appended for each.
EmbeddingTable parse_embeddings(std::istream &in, std::vector<std::string> *warnings = nullptr);
EmbeddingTable load_embeddings(const std::string &path,
                               std::vector<std::string> *warnings = nullptr);

struct NameEmbedding {
  std::vector<double> vec;
  bool oov = false;
};

/// Mean of the in-table subtoken vectors, or a zero vector with oov = true.
NameEmbedding embed_name(const EmbeddingTable &table, std::string_view name);

/// Whitespace and punctuation split, lowercased.
std::vector<std::string> tokenize_doc(std::string_view doc);

/// Token vocabulary for the jointly trained doc embedding. Index 0 is the
/// unknown-token slot.
class DocVocabulary {
public:
  static constexpr const char *kUnknown = "<unk>";

  DocVocabulary();
  explicit DocVocabulary(std::vector<std::string> tokens); // tokens[0] must be kUnknown

  /// Tokens occurring at least `min_count` times, sorted for determinism.
  static DocVocabulary build(const std::vector<std::optional<std::string>> &docs,
                             std::size_t min_count = 1);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }
  int id(const std::string &token) const;
  /// Token ids of a doc; empty for an absent or empty doc.
  std::vector<int> encode(const std::optional<std::string> &doc) const;

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Mean of `rows[id]` over the ids; zero vector of `dim` for no ids.
std::vector<double> embed_doc(const std::vector<std::vector<double>> &rows, std::size_t dim,
                              const std::vector<int> &ids);

struct FeatureVector {
  std::vector<double> source_vec;
  std::optional<std::vector<double>> function_vec;
  std::vector<int> doc_ids; // jointly trained part, resolved by the model
  bool has_doc = false;
  bool source_oov = false;
  bool function_oov = false;
};

FeatureVector featurize(const EmbeddingTable &table, const DocVocabulary *vocab,
                        const FlowRecord &flow);

/// Dense part of the model input: integrity = source ++ function (zeros if
/// absent); logging = source.
std::vector<double> dense_input(const FeatureVector &f, QueryFamily family);

double cosine(const std::vector<double> &a, const std::vector<double> &b);

} // namespace nlflow
