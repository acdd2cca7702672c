// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/ocsvm.hpp"

#include "nlflow/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace nlflow::ocsvm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Polarity p) {
  return p == Polarity::NovelIsUnexpected ? "novel_is_unexpected" : "inlier_is_unexpected";
}

Polarity parse_polarity(std::string_view text) {
  if (text == "novel_is_unexpected")
    return Polarity::NovelIsUnexpected;
  if (text == "inlier_is_unexpected")
    return Polarity::InlierIsUnexpected;
  throw ValidationError("unknown polarity \"" + std::string(text) + "\"");
}

double rbf(const std::vector<double> &x, const std::vector<double> &y, double gamma) {
  if (x.size() != y.size())
    throw ValidationError("kernel arguments differ in dimension");
  double d2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false for a (numerically) singular system.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double> &x) {
  std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col]))
        piv = r;
    if (std::abs(a[piv][col]) < 1e-12)
      return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      if (f == 0)
        continue;
      for (std::size_t c = col; c < n; ++c)
        a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c)
      s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

// Re-solves the equality-constrained problem on the free set the pairwise
// solver converged to, removing its tolerance-sized residual.
void polish(const std::vector<std::vector<double>> &k, double upper, std::vector<double> &alpha) {
  std::size_t n = alpha.size();
  const double eps = 1e-9;
  std::vector<std::size_t> free_set;
  double fixed_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > eps && alpha[i] < upper - eps)
      free_set.push_back(i);
    else if (alpha[i] >= upper - eps)
      fixed_sum += upper;
  }
  if (free_set.empty())
    return;
  std::size_t m = free_set.size();
  // [K_FF  -1] [α_F]   [-K_FB α_B]
  // [1ᵀ     0] [ρ  ] = [1 - Σα_B ]
  std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 0.0));
  std::vector<double> b(m + 1, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t i = free_set[r];
    for (std::size_t c = 0; c < m; ++c)
      a[r][c] = k[i][free_set[c]];
    a[r][m] = -1;
    double rhs = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (alpha[j] >= upper - eps)
        rhs -= k[i][j] * upper;
    b[r] = rhs;
    a[m][r] = 1;
  }
  b[m] = 1 - fixed_sum;
  std::vector<double> x;
  if (!solve_linear(a, b, x))
    return;
  for (std::size_t r = 0; r < m; ++r)
    if (x[r] < -1e-7 || x[r] > upper + 1e-7)
      return;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] <= eps)
      alpha[i] = 0;
    else if (alpha[i] >= upper - eps)
      alpha[i] = upper;
  }
  for (std::size_t r = 0; r < m; ++r)
    alpha[free_set[r]] = std::clamp(x[r], 0.0, upper);
}

} // namespace

Model train(const std::vector<std::vector<double>> &vectors, double gamma, double nu,
            const SolverOptions &options) {
  if (vectors.empty())
    throw ConfigError("OC-SVM training needs at least one vector");
  if (!(nu > 0 && nu <= 1))
    throw ConfigError("nu must lie in (0, 1], got " + std::to_string(nu));
  if (!(gamma > 0))
    throw ConfigError("gamma must be positive");
  std::size_t n = vectors.size();
  std::size_t dim = vectors[0].size();
  for (const auto &v : vectors)
    if (v.size() != dim)
      throw ConfigError("OC-SVM training vectors differ in dimension");

  std::vector<std::vector<double>> k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      k[i][j] = k[j][i] = rbf(vectors[i], vectors[j], gamma);

  const double upper = 1.0 / (nu * static_cast<double>(n));
  std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
  std::vector<double> g(n, 0.0); // gradient K α
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g[i] += k[i][j] * alpha[j];

  std::size_t iter = 0;
  double gap = 0;
  for (; iter < options.max_iterations; ++iter) {
    // Most violating pair: grow the α with the smallest gradient, shrink
    // the one with the largest.
    std::size_t up = n, low = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] < upper && (up == n || g[i] < g[up]))
        up = i;
      if (alpha[i] > 0 && (low == n || g[i] > g[low]))
        low = i;
    }
    if (up == n || low == n)
      break;
    gap = g[low] - g[up];
    if (gap < options.tolerance)
      break;
    double curv = k[up][up] + k[low][low] - 2 * k[up][low];
    double t = gap / std::max(curv, 1e-12);
    t = std::min({t, upper - alpha[up], alpha[low]});
    alpha[up] += t;
    alpha[low] -= t;
    if (alpha[low] < 1e-15)
      alpha[low] = 0;
    for (std::size_t i = 0; i < n; ++i)
      g[i] += t * (k[i][up] - k[i][low]);
  }
  if (iter == options.max_iterations)
    throw NumericError("OC-SVM solver did not converge after " + std::to_string(iter) +
                       " iterations (KKT residual " + std::to_string(gap) + ")");

  polish(k, upper, alpha);
  for (double &a : alpha)
    a = std::clamp(a, 0.0, upper);

  Model m;
  m.gamma = gamma;
  m.nu = nu;
  m.alphas = alpha;
  m.support_vectors = vectors;
  std::vector<double> ka(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      ka[i] += k[i][j] * alpha[j];
  double sum_free = 0, sum_sv = 0;
  std::size_t n_free = 0, n_sv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0) {
      sum_sv += ka[i];
      ++n_sv;
      if (alpha[i] < upper) {
        sum_free += ka[i];
        ++n_free;
      }
    }
  }
  m.rho = n_free > 0 ? sum_free / static_cast<double>(n_free)
                     : sum_sv / static_cast<double>(std::max<std::size_t>(n_sv, 1));
  return m;
}

double decision_value(const Model &m, const std::vector<double> &x) {
  double s = 0;
  for (std::size_t i = 0; i < m.alphas.size(); ++i)
    if (m.alphas[i] != 0)
      s += m.alphas[i] * rbf(m.support_vectors[i], x, m.gamma);
  if (!m.support_vectors.empty() && m.support_vectors[0].size() != x.size())
    throw ValidationError("query vector has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(m.support_vectors[0].size()));
  return s - m.rho;
}

Verdict unexpectedness(const Model &m, const std::vector<double> &x,
                       std::optional<double> threshold) {
  double f = decision_value(m, x);
  Verdict v;
  v.model_kind = ModelKind::Novelty;
  v.score = m.polarity == Polarity::NovelIsUnexpected ? -f : f;
  if (threshold) {
    v.decision = v.score >= *threshold ? Label::Unexpected : Label::Expected;
  } else {
    bool inlier = f >= -1e-9;
    bool unexpected = m.polarity == Polarity::NovelIsUnexpected ? !inlier : inlier;
    v.decision = unexpected ? Label::Unexpected : Label::Expected;
  }
  return v;
}

// ---------------------------------------------------------------------------

const SeedSets &default_seeds() {
  static const SeedSets seeds = {
      {SinkType::CmdInj, {"execute", "command"}},
      {SinkType::CodeInj, {"eval", "execute", "compile", "render", "callback", "function", "fn"}},
      {SinkType::XSS, {"sent", "content"}},
      {SinkType::PathTrav, {"file", "directory", "path", "cwd", "source", "input"}},
      {SinkType::Logging, {"authkey", "password", "passcode", "passphrase"}},
  };
  return seeds;
}

SeedSets parse_seeds(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("seed file: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("seed file must be an object mapping sink types to name lists");
  SeedSets out;
  for (const auto &[key, names] : j.items()) {
    SinkType t;
    try {
      t = parse_sink_type(key);
    } catch (const ValidationError &e) {
      throw ConfigError(std::string("seed file: ") + e.what());
    }
    if (t == SinkType::None)
      throw ConfigError("seed file: None has no seeds");
    if (!names.is_array() || names.empty() || names.size() > 16)
      throw ConfigError("seed file: " + key + " needs between 1 and 16 names");
    for (const auto &n : names) {
      if (!n.is_string() || n.get<std::string>().empty())
        throw ConfigError("seed file: " + key + " names must be non-empty strings");
      out[t].push_back(n.get<std::string>());
    }
  }
  return out;
}

SeedSets load_seeds(const std::string &path) { return parse_seeds(read_file(path)); }

std::string serialize_seeds(const SeedSets &seeds) {
  ordered_json j = ordered_json::object();
  for (const auto &[t, names] : seeds)
    j[std::string(to_string(t))] = names;
  return j.dump(2) + "\n";
}

Verdict Detector::classify(const EmbeddingTable &table, const FlowRecord &flow,
                           std::optional<double> threshold) const {
  if (flow.sink_type == SinkType::None)
    throw ValidationError("novelty detection is never queried for None flows");
  auto it = models.find(flow.sink_type);
  if (it == models.end())
    throw ValidationError("no novelty model for sink type " +
                          std::string(to_string(flow.sink_type)));
  if (table.dim != embedding_dim)
    throw ConfigError("embedding table has dimension " + std::to_string(table.dim) +
                      " but the detector was trained with " + std::to_string(embedding_dim));
  return unexpectedness(it->second, embed_name(table, flow.source_name).vec, threshold);
}

Detector train_detector(const EmbeddingTable &table, const SeedSets &seeds, double gamma,
                        double nu, std::vector<std::string> *warnings) {
  Detector d;
  d.embedding_dim = table.dim;
  for (const auto &[sink, names] : seeds) {
    std::vector<std::vector<double>> vectors;
    for (const auto &name : names) {
      NameEmbedding e = embed_name(table, name);
      if (e.oov) {
        if (warnings)
          warnings->push_back("seed \"" + name + "\" for " + std::string(to_string(sink)) +
                              " is out of vocabulary; skipped");
        continue;
      }
      vectors.push_back(std::move(e.vec));
    }
    if (vectors.empty())
      throw ConfigError("no in-vocabulary seed names for " + std::string(to_string(sink)));
    Model m = train(vectors, gamma, nu);
    m.sink_type = sink;
    m.polarity =
        sink == SinkType::Logging ? Polarity::InlierIsUnexpected : Polarity::NovelIsUnexpected;
    d.models.emplace(sink, std::move(m));
  }
  return d;
}

std::string serialize(const Model &m, std::size_t embedding_dim) {
  ordered_json j;
  j["version"] = kModelVersion;
  j["kind"] = "ocsvm";
  j["sink_type"] = nlflow::to_string(m.sink_type);
  j["embedding_dim"] = embedding_dim;
  j["gamma"] = m.gamma;
  j["nu"] = m.nu;
  j["rho"] = m.rho;
  j["alphas"] = m.alphas;
  j["support_vectors"] = m.support_vectors;
  j["polarity"] = to_string(m.polarity);
  return j.dump() + "\n";
}

Model parse_model(std::string_view text, std::size_t *embedding_dim) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ModelError(std::string("corrupt OC-SVM model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version"))
    throw ModelError("corrupt OC-SVM model file: missing version");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kModelVersion)
    throw VersionError("unsupported OC-SVM model version " + j["version"].dump());
  try {
    if (j.at("kind") != "ocsvm")
      throw ModelError("not an OC-SVM model file");
    Model m;
    m.sink_type = parse_sink_type(j.at("sink_type").get<std::string>());
    m.gamma = j.at("gamma").get<double>();
    m.nu = j.at("nu").get<double>();
    m.rho = j.at("rho").get<double>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.polarity = parse_polarity(j.at("polarity").get<std::string>());
    if (m.alphas.size() != m.support_vectors.size() || m.alphas.empty())
      throw ModelError("corrupt OC-SVM model file: alphas and support vectors disagree");
    if (embedding_dim)
      *embedding_dim = j.at("embedding_dim").get<std::size_t>();
    return m;
  } catch (const json::exception &e) {
    throw ModelError(std::string("corrupt OC-SVM model file: ") + e.what());
  } catch (const ValidationError &e) {
    throw ModelError(std::string("corrupt OC-SVM model file: ") + e.what());
  }
}

void save_detector(const Detector &d, const std::string &dir) {
  std::filesystem::create_directories(dir);
  for (const auto &[sink, m] : d.models)
    write_file(dir + "/ocsvm_" + std::string(nlflow::to_string(sink)) + ".json",
               serialize(m, d.embedding_dim));
}

Detector load_detector(const std::string &dir) {
  Detector d;
  bool any = false;
  for (SinkType t : {SinkType::CmdInj, SinkType::CodeInj, SinkType::XSS, SinkType::PathTrav,
                     SinkType::Logging}) {
    std::string path = dir + "/ocsvm_" + std::string(nlflow::to_string(t)) + ".json";
    if (!std::filesystem::exists(path))
      continue;
    std::size_t dim = 0;
    Model m = parse_model(read_file(path), &dim);
    if (any && dim != d.embedding_dim)
      throw ModelError("OC-SVM models in " + dir + " disagree on the embedding dimension");
    d.embedding_dim = dim;
    d.models.emplace(t, std::move(m));
    any = true;
  }
  if (!any)
    throw ModelError("no OC-SVM model files in " + dir);
  return d;
}

} // namespace nlflow::ocsvm
