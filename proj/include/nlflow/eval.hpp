// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Metrics, threshold sweeps, cross-validation and per-model evaluation.
// Unexpected is the positive class throughout.

#pragma once

#include "nlflow/baselines.hpp"
#include "nlflow/embed.hpp"
#include "nlflow/flow.hpp"
#include "nlflow/llm.hpp"
#include "nlflow/mlp.hpp"
#include "nlflow/ocsvm.hpp"

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlflow::eval {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(Label predicted, Label actual);
  Confusion &operator+=(const Confusion &o);
  bool operator==(const Confusion &) const = default;
};

struct Metrics {
  double precision = 0, recall = 0, f1 = 0;
};

/// Zero denominators give zero.
Metrics precision_recall_f1(const Confusion &c);

struct PrPoint {
  double threshold = 0; // +inf for the "report nothing" point
  double precision = 0, recall = 0, f1 = 0;
};

struct Sweep {
  std::vector<PrPoint> points; // ascending threshold
  double best_threshold = std::numeric_limits<double>::infinity();
  Metrics best;
  Confusion best_confusion;
};

/// Every distinct score and +inf as a threshold; Unexpected iff score >= t.
/// Best F1 ties go to the smallest threshold. Throws ValidationError when
/// no label is Unexpected.
Sweep sweep_thresholds(const std::vector<std::pair<double, Label>> &scored);

struct Split {
  std::vector<std::size_t> train, test;
};

/// Seeded shuffle into k disjoint covering test folds whose sizes differ by
/// at most one. Throws ConfigError when n < k.
std::vector<Split> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

enum class Protocol { Sweep, KFold, Direct };
std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view text);
Protocol protocol_for(ModelKind kind);

struct FoldResult {
  std::size_t fold = 0;
  Confusion confusion;
  Metrics metrics;
};

struct SinkReport {
  SinkType sink = SinkType::None;
  std::size_t n = 0;
  Confusion confusion;
  Metrics metrics;
  std::optional<double> best_threshold;
};

struct EvalReport {
  ModelKind model = ModelKind::Novelty;
  Protocol protocol = Protocol::Sweep;
  QueryFamily query = QueryFamily::Integrity;
  std::size_t n = 0;
  Confusion confusion;
  Metrics metrics; // k-fold: mean over folds
  std::optional<double> best_threshold;
  std::vector<PrPoint> pr_points;
  std::vector<FoldResult> folds;
  std::vector<SinkReport> per_sink;
  std::vector<std::string> warnings;
};

/// Everything a model kind may need. Unused fields are ignored.
struct EvalInputs {
  QueryFamily query = QueryFamily::Integrity;
  std::vector<LabeledFlow> labeled;  // evaluation set
  std::vector<FlowRecord> corpus;    // unlabeled training corpus (sink prediction, frequency)
  const EmbeddingTable *embeddings = nullptr;
  ocsvm::SeedSets seeds = ocsvm::default_seeds();
  double gamma = ocsvm::kDefaultGamma;
  double nu = ocsvm::kDefaultNu;
  baselines::RegexClassifier patterns;
  mlp::TrainConfig sink_config = mlp::TrainConfig::sink_prediction();
  mlp::TrainConfig binary_config = mlp::TrainConfig::binary();
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  llm::CompletionClient *client = nullptr;
  llm::PromptConfig llm_config;
};

/// Runs `kind` under `protocol` (which must be the kind's protocol; a
/// mismatch is a ConfigError).
EvalReport evaluate_model(ModelKind kind, Protocol protocol, const EvalInputs &inputs);

/// Native JSON. `generated_at` is the only field that varies between runs.
std::string report_json(const EvalReport &r, const std::string &generated_at);
/// threshold,precision,recall,f1 rows.
std::string pr_csv(const EvalReport &r);

} // namespace nlflow::eval
