// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/embed.hpp"

#include "nlflow/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlflow {

const std::vector<double> *EmbeddingTable::find(const std::string &token) const {
  auto it = entries.find(token);
  return it == entries.end() ? nullptr : &it->second;
}

namespace {

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(unsigned char c) { return (c >= 'a' && c <= 'z') || c >= 0x80; }

} // namespace

std::vector<std::string> subtokenize(std::string_view name) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty())
      out.push_back(to_lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(name[i]);
    if (!is_upper(c) && !is_lower(c)) {
      flush();
      continue;
    }
    if (is_upper(c) && !cur.empty()) {
      unsigned char prev = static_cast<unsigned char>(cur.back());
      bool next_lower = i + 1 < name.size() && is_lower(static_cast<unsigned char>(name[i + 1]));
      if (is_lower(prev) || (is_upper(prev) && next_lower))
        flush();
    }
    cur += static_cast<char>(c);
  }
  flush();
  return out;
}

EmbeddingTable parse_embeddings(std::istream &in, std::vector<std::string> *warnings) {
  EmbeddingTable table;
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("embedding file is empty; expected a \"<count> <k>\" header", 1);
  std::istringstream header(line);
  long long count = -1, dim = -1;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra) || count < 0 || dim <= 0)
    throw ParseError("bad embedding header \"" + line + "\"; expected \"<count> <k>\"", 1);
  table.dim = static_cast<std::size_t>(dim);
  std::size_t line_no = 1;
  long long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    if (seen == count)
      throw ParseError("more vectors than the header's count of " + std::to_string(count),
                       line_no);
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> vec;
    std::string num;
    while (fields >> num) {
      char *end = nullptr;
      double v = std::strtod(num.c_str(), &end);
      if (end != num.c_str() + num.size() || !std::isfinite(v))
        throw ParseError("invalid number \"" + num + "\"", line_no);
      vec.push_back(v);
    }
    if (vec.size() != table.dim)
      throw ParseError("vector for \"" + token + "\" has " + std::to_string(vec.size()) +
                           " components, expected " + std::to_string(table.dim),
                       line_no);
    std::string key = to_lower(token);
    if (table.entries.contains(key) && warnings)
      warnings->push_back("line " + std::to_string(line_no) + ": duplicate token \"" + key +
                          "\", keeping the last vector");
    table.entries[key] = std::move(vec);
    ++seen;
  }
  if (seen != count)
    throw ParseError("header declares " + std::to_string(count) + " vectors but " +
                         std::to_string(seen) + " were found",
                     line_no + 1);
  return table;
}

EmbeddingTable load_embeddings(const std::string &path, std::vector<std::string> *warnings) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open embedding file " + path);
  try {
    return parse_embeddings(in, warnings);
  } catch (const ParseError &e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

NameEmbedding embed_name(const EmbeddingTable &table, std::string_view name) {
  NameEmbedding out;
  out.vec.assign(table.dim, 0.0);
  std::size_t hits = 0;
  for (const auto &tok : subtokenize(name)) {
    if (const auto *v = table.find(tok)) {
      for (std::size_t i = 0; i < table.dim; ++i)
        out.vec[i] += (*v)[i];
      ++hits;
    }
  }
  if (hits == 0) {
    out.oov = true;
    return out;
  }
  for (double &x : out.vec)
    x /= static_cast<double>(hits);
  return out;
}

std::vector<std::string> tokenize_doc(std::string_view doc) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : doc) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80 || c == '_') {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty())
    out.push_back(std::move(cur));
  return out;
}

DocVocabulary::DocVocabulary() : DocVocabulary(std::vector<std::string>{kUnknown}) {}

DocVocabulary::DocVocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kUnknown)
    throw ModelError("doc vocabulary must start with the unknown-token slot");
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second)
      throw ModelError("duplicate doc vocabulary token \"" + tokens_[i] + "\"");
}

DocVocabulary DocVocabulary::build(const std::vector<std::optional<std::string>> &docs,
                                   std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto &d : docs)
    if (d)
      for (auto &t : tokenize_doc(*d))
        ++counts[t];
  std::vector<std::string> tokens{kUnknown};
  for (const auto &[t, n] : counts)
    if (n >= min_count && t != kUnknown)
      tokens.push_back(t);
  return DocVocabulary(std::move(tokens));
}

int DocVocabulary::id(const std::string &token) const {
  auto it = index_.find(token);
  return it == index_.end() ? 0 : it->second;
}

std::vector<int> DocVocabulary::encode(const std::optional<std::string> &doc) const {
  std::vector<int> ids;
  if (doc)
    for (const auto &t : tokenize_doc(*doc))
      ids.push_back(id(t));
  return ids;
}

std::vector<double> embed_doc(const std::vector<std::vector<double>> &rows, std::size_t dim,
                              const std::vector<int> &ids) {
  std::vector<double> out(dim, 0.0);
  if (ids.empty())
    return out;
  for (int id : ids)
    for (std::size_t i = 0; i < dim; ++i)
      out[i] += rows.at(static_cast<std::size_t>(id))[i];
  for (double &x : out)
    x /= static_cast<double>(ids.size());
  return out;
}

FeatureVector featurize(const EmbeddingTable &table, const DocVocabulary *vocab,
                        const FlowRecord &flow) {
  FeatureVector f;
  NameEmbedding src = embed_name(table, flow.source_name);
  f.source_vec = std::move(src.vec);
  f.source_oov = src.oov;
  if (flow.function_name) {
    NameEmbedding fn = embed_name(table, *flow.function_name);
    f.function_vec = std::move(fn.vec);
    f.function_oov = fn.oov;
  }
  f.has_doc = flow.doc_comment.has_value();
  if (vocab)
    f.doc_ids = vocab->encode(flow.doc_comment);
  return f;
}

std::vector<double> dense_input(const FeatureVector &f, QueryFamily family) {
  std::vector<double> out = f.source_vec;
  if (family == QueryFamily::Integrity) {
    if (f.function_vec)
      out.insert(out.end(), f.function_vec->begin(), f.function_vec->end());
    else
      out.insert(out.end(), f.source_vec.size(), 0.0);
  }
  return out;
}

double cosine(const std::vector<double> &a, const std::vector<double> &b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0)
    return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace nlflow
