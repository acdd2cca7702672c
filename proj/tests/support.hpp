// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test fixtures and independent reference implementations.

#pragma once

#include "nlflow/common.hpp"
#include "nlflow/eval.hpp"
#include "nlflow/flow.hpp"
#include "nlflow/taint.hpp"

#include <Eigen/Dense>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace nlflow::test {

inline const std::string kTestDir = NLFLOW_TEST_DIR;
inline const std::string kDataDir = NLFLOW_DATA_DIR;
inline const std::string kCorpusDir = kTestDir + "/corpus";

// ---------------------------------------------------------------------------
// Corpus annotations

/// (file, source kind, name, line, function or "-", sink, sink line or -1)
using FlowKey = std::tuple<std::string, std::string, std::string, std::int64_t, std::string,
                           std::string, std::int64_t>;

inline FlowKey key_of(const FlowRecord &f) {
  return {f.file,
          std::string(to_string(f.source_kind)),
          f.source_name,
          f.line,
          f.function_name.value_or("-"),
          std::string(to_string(f.sink_type)),
          f.sink_line.value_or(-1)};
}

inline std::set<FlowKey> expected_flows(const std::string &family_dir) {
  static const std::regex annotation(
      R"(^// expect: (\S+) (\S+) (\d+) (\S+) (\S+) (\S+)\s*$)");
  std::set<FlowKey> out;
  for (const auto &e : std::filesystem::directory_iterator(family_dir)) {
    std::ifstream in(e.path());
    std::string line;
    while (std::getline(in, line)) {
      std::smatch m;
      if (std::regex_match(line, m, annotation))
        out.insert({e.path().filename().string(), m[1], m[2], std::stoll(m[3]), m[4], m[5],
                    m[6] == "-" ? -1 : std::stoll(m[6])});
    }
  }
  return out;
}

inline std::vector<std::string> corpus_sanitizers() {
  std::vector<std::string> out;
  std::ifstream in(kCorpusDir + "/sanitizers.txt");
  for (std::string s; std::getline(in, s);)
    if (!s.empty())
      out.push_back(s);
  return out;
}

inline taint::ScanResult scan_corpus(QueryFamily family) {
  taint::TaintConfig cfg;
  cfg.sanitizers = corpus_sanitizers();
  taint::ScanOptions opt;
  opt.project = "corpus";
  return taint::scan_project(kCorpusDir + "/" + std::string(to_string(family)), family, cfg, opt);
}

inline std::vector<LabeledFlow> corpus_labeled(QueryFamily family) {
  std::map<std::tuple<std::string, std::string, std::int64_t, std::string>, Label> table;
  std::ifstream in(kCorpusDir + "/labels.txt");
  std::string prefix = std::string(to_string(family)) + "/";
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream f(line);
    std::string file, name, sink, label;
    std::int64_t at = 0;
    f >> file >> name >> at >> sink >> label;
    if (file.rfind(prefix, 0) == 0)
      table[{file.substr(prefix.size()), name, at, sink}] = parse_label(label);
  }
  std::vector<LabeledFlow> out;
  for (const auto &flow : scan_corpus(family).flows) {
    auto it = table.find({flow.file, flow.source_name, flow.line,
                          std::string(to_string(flow.sink_type))});
    if (it != table.end())
      out.push_back({flow, it->second});
  }
  return out;
}

inline FlowRecord make_flow(const std::string &name, SinkType sink,
                            std::optional<std::string> function = std::nullopt,
                            std::optional<std::string> doc = std::nullopt,
                            std::int64_t line = 1) {
  FlowRecord f;
  f.project = "p";
  f.file = "f.js";
  f.line = line;
  f.source_name = name;
  f.sink_type = sink;
  if (sink == SinkType::Logging) {
    f.source_kind = SourceKind::LoggedVar;
    f.function_name = function;
  } else {
    f.function_name = function.value_or("api");
  }
  f.doc_comment = doc;
  if (sink != SinkType::None)
    f.sink_line = line + 1;
  f.id = compute_flow_id(f);
  return f;
}

// ---------------------------------------------------------------------------
// Temporary directories

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("nlflow_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string operator/(const std::string &name) const { return (path / name).string(); }
};

/// Drops the "generated_at" line so report files can be compared.
inline std::string without_timestamp(const std::string &text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line))
    if (line.find("\"generated_at\"") == std::string::npos)
      out += line + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// OC-SVM dual by exhaustive active-set enumeration

struct QpSolution {
  std::vector<double> alphas;
  double rho = 0;
  double objective = 0;
};

/// Minimizes ½ αᵀKα subject to Σα = 1, 0 ≤ α ≤ C = 1/(νn) by trying every
/// assignment of each variable to {lower bound, upper bound, free} and
/// solving the equality-constrained problem on the free set.
inline QpSolution brute_force_ocsvm(const std::vector<std::vector<double>> &x, double gamma,
                                    double nu) {
  const std::size_t n = x.size();
  const double c = 1.0 / (nu * static_cast<double>(n));
  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0;
      for (std::size_t t = 0; t < x[i].size(); ++t)
        d += (x[i][t] - x[j][t]) * (x[i][t] - x[j][t]);
      k(i, j) = std::exp(-gamma * d);
    }
  QpSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i)
    combos *= 3;
  for (std::size_t code = 0; code < combos; ++code) {
    std::vector<int> state(n); // 0 lower, 1 upper, 2 free
    std::size_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    std::vector<std::size_t> free_set;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    double fixed_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) {
        alpha(static_cast<Eigen::Index>(i)) = c;
        fixed_sum += c;
      } else if (state[i] == 2) {
        free_set.push_back(i);
      }
    }
    if (!free_set.empty()) {
      const auto m = static_cast<Eigen::Index>(free_set.size());
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index s = 0; s < m; ++s)
          a(r, s) = k(static_cast<Eigen::Index>(free_set[r]), static_cast<Eigen::Index>(free_set[s]));
        a(r, m) = -1;
        a(m, r) = 1;
        double rhs = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (state[j] == 1)
            rhs -= k(static_cast<Eigen::Index>(free_set[r]), static_cast<Eigen::Index>(j)) * c;
        b(r) = rhs;
      }
      b(m) = 1 - fixed_sum;
      Eigen::VectorXd sol = a.fullPivLu().solve(b);
      if (!(a * sol).isApprox(b, 1e-9))
        continue;
      for (Eigen::Index r = 0; r < m; ++r)
        alpha(static_cast<Eigen::Index>(free_set[r])) = sol(r);
    } else if (std::abs(fixed_sum - 1) > 1e-12) {
      continue;
    }
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      double v = alpha(static_cast<Eigen::Index>(i));
      if (v < -1e-12 || v > c + 1e-12)
        feasible = false;
    }
    if (!feasible)
      continue;
    double obj = 0.5 * alpha.dot(k * alpha);
    if (obj < best.objective - 1e-15) {
      best.objective = obj;
      best.alphas.assign(alpha.data(), alpha.data() + n);
    }
  }
  // ρ: mean gradient over free variables, or over all positive ones.
  Eigen::VectorXd a = Eigen::Map<Eigen::VectorXd>(best.alphas.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd g = k * a;
  double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (best.alphas[i] > 1e-9 && best.alphas[i] < c - 1e-9) {
      sum += g(static_cast<Eigen::Index>(i));
      ++count;
    }
  if (count == 0)
    for (std::size_t i = 0; i < n; ++i)
      if (best.alphas[i] > 1e-9) {
        sum += g(static_cast<Eigen::Index>(i));
        ++count;
      }
  best.rho = sum / count;
  return best;
}

inline double oracle_decision(const std::vector<std::vector<double>> &x, const QpSolution &s,
                              double gamma, const std::vector<double> &q) {
  double f = -s.rho;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0;
    for (std::size_t t = 0; t < q.size(); ++t)
      d += (x[i][t] - q[t]) * (x[i][t] - q[t]);
    f += s.alphas[i] * std::exp(-gamma * d);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Metrics oracles

inline double closed_form_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  // F1 = 2tp / (2tp + fp + fn), which equals the harmonic mean whenever it is defined.
  if (tp == 0)
    return 0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

/// Best F1 over every labeling that flags a score-closed-upward subset.
inline double exhaustive_best_f1(const std::vector<std::pair<double, Label>> &scored) {
  const std::size_t n = scored.size();
  double best = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    bool monotone = true;
    for (std::size_t i = 0; i < n && monotone; ++i)
      if (mask >> i & 1)
        for (std::size_t j = 0; j < n; ++j)
          if (scored[j].first >= scored[i].first && !(mask >> j & 1))
            monotone = false;
    if (!monotone)
      continue;
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool flagged = mask >> i & 1;
      bool positive = scored[i].second == Label::Unexpected;
      tp += flagged && positive;
      fp += flagged && !positive;
      fn += !flagged && positive;
    }
    best = std::max(best, closed_form_f1(tp, fp, fn));
  }
  return best;
}

/// Occurrences of (name, sink) counted by a plain scan over the corpus.
inline std::size_t recount(const std::vector<FlowRecord> &flows, const std::string &name,
                           SinkType sink) {
  std::size_t n = 0;
  for (const auto &f : flows)
    if (f.source_name == name && f.sink_type == sink)
      ++n;
  return n;
}

} // namespace nlflow::test
