// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// One-class SVM with an RBF kernel, trained on embedded seed names.

#pragma once

#include "nlflow/embed.hpp"
#include "nlflow/flow.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nlflow::ocsvm {

constexpr double kDefaultGamma = 0.05;
constexpr double kDefaultNu = 0.01;
constexpr int kModelVersion = 1;

enum class Polarity {
  NovelIsUnexpected,  // integrity sinks: seeds are the expected names
  InlierIsUnexpected, // logging: seeds are the sensitive names
};

std::string_view to_string(Polarity p);
Polarity parse_polarity(std::string_view text);

struct Model {
  double gamma = kDefaultGamma;
  double nu = kDefaultNu;
  double rho = 0;
  std::vector<double> alphas;
  std::vector<std::vector<double>> support_vectors;
  Polarity polarity = Polarity::NovelIsUnexpected;
  SinkType sink_type = SinkType::CmdInj;
};

double rbf(const std::vector<double> &x, const std::vector<double> &y, double gamma);

struct SolverOptions {
  double tolerance = 1e-6;
  std::size_t max_iterations = 100000;
};

/// Solves min ½ αᵀKα s.t. 0 ≤ α ≤ 1/(νn), Σα = 1. Every training vector is
/// kept as a support vector (zero alphas included). Throws ConfigError on
/// bad parameters or ragged input and NumericError if the solver does not
/// converge.
Model train(const std::vector<std::vector<double>> &vectors, double gamma = kDefaultGamma,
            double nu = kDefaultNu, const SolverOptions &options = {});

/// f(x) = Σ αᵢ K(xᵢ, x) − ρ; positive means inlier.
double decision_value(const Model &m, const std::vector<double> &x);

/// score = −f (novel is unexpected) or +f (inlier is unexpected). With a
/// threshold the decision is score ≥ threshold; without one it follows the
/// side of the boundary, with points on it counted as inliers.
Verdict unexpectedness(const Model &m, const std::vector<double> &x,
                       std::optional<double> threshold = std::nullopt);

// ---------------------------------------------------------------------------
// Seeds and per-sink detectors

using SeedSets = std::map<SinkType, std::vector<std::string>>;

const SeedSets &default_seeds();
SeedSets parse_seeds(std::string_view json_text);
SeedSets load_seeds(const std::string &path);
std::string serialize_seeds(const SeedSets &seeds);

struct Detector {
  std::size_t embedding_dim = 0;
  std::map<SinkType, Model> models;

  /// Scores the embedded source name of `flow` against the model for its
  /// sink type. Throws ValidationError for None flows or missing models.
  Verdict classify(const EmbeddingTable &table, const FlowRecord &flow,
                   std::optional<double> threshold = std::nullopt) const;
};

/// One model per sink type. Seeds whose subtokens are all out of vocabulary
/// are skipped with a warning; a sink left without seeds is a ConfigError.
Detector train_detector(const EmbeddingTable &table, const SeedSets &seeds,
                        double gamma = kDefaultGamma, double nu = kDefaultNu,
                        std::vector<std::string> *warnings = nullptr);

std::string serialize(const Model &m, std::size_t embedding_dim);
Model parse_model(std::string_view text, std::size_t *embedding_dim = nullptr);

/// Writes ocsvm_<Sink>.json per model into `dir` (created if needed).
void save_detector(const Detector &d, const std::string &dir);
Detector load_detector(const std::string &dir);

} // namespace nlflow::ocsvm
