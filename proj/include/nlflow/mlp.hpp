// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Feed-forward classifier: ReLU hidden layers, softmax output, cross-entropy
// loss, Adam. The input is a dense vector optionally followed by the mean of
// jointly trained doc-token embeddings.

#pragma once

#include "nlflow/common.hpp"
#include "nlflow/embed.hpp"
#include "nlflow/flow.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace nlflow::mlp {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t patience = 50;
  /// Share of the training data held out for early stopping. With 0 the
  /// training loss is monitored instead.
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  std::size_t max_epochs = 1000;
  bool class_weights = false; // inverse class frequency
  std::vector<std::size_t> hidden = {500, 250};

  static TrainConfig binary();
  static TrainConfig sink_prediction();
};

nlohmann::ordered_json to_json(const TrainConfig &c);
TrainConfig train_config_from_json(const nlohmann::json &j);

struct Sample {
  std::vector<double> dense;
  std::vector<int> doc; // doc-token ids; ignored when the model has no doc part
  int label = 0;
};

class Model {
public:
  Model() = default;
  /// Zero-initialized model. `doc_dim` = 0 disables the doc part.
  Model(std::size_t dense_dim, std::size_t doc_dim, std::size_t vocab_size,
        const std::vector<std::size_t> &hidden, std::size_t classes);

  /// Glorot-uniform weights, zero biases, doc rows uniform in ±sqrt(6/(vocab+dim)).
  void init_random(Rng &rng);

  std::size_t dense_dim() const { return dense_dim_; }
  std::size_t doc_dim() const { return doc_dim_; }
  std::size_t vocab_size() const { return doc_rows_.size(); }
  std::size_t classes() const { return dims_.back(); }
  /// [input, hidden..., output]; input = dense_dim + doc_dim.
  const std::vector<std::size_t> &layer_dims() const { return dims_; }

  /// Probability vector. Throws ValidationError on a dimension mismatch.
  std::vector<double> forward(const Sample &s) const;

  /// Mean (optionally weighted) cross-entropy over `batch`; when `grad` is
  /// non-null it receives the gradient in parameter order.
  double loss(const std::vector<Sample> &batch, const std::vector<double> &class_weights,
              std::vector<double> *grad) const;

  /// Flat parameter view: every weight matrix and bias vector in layer
  /// order, then the doc embedding rows.
  std::size_t parameter_count() const;
  double parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double v);
  void apply_update(const std::vector<double> &delta); // params += delta

  // Raw access for serialization and tests (row-major, out x in).
  std::vector<std::vector<double>> &weights() { return w_; }
  std::vector<std::vector<double>> &biases() { return b_; }
  std::vector<std::vector<double>> &doc_rows() { return doc_rows_; }
  const std::vector<std::vector<double>> &weights() const { return w_; }
  const std::vector<std::vector<double>> &biases() const { return b_; }
  const std::vector<std::vector<double>> &doc_rows() const { return doc_rows_; }

private:
  struct Trace {
    std::vector<std::vector<double>> act; // act[0] = input, act[l+1] = layer l output
    std::vector<double> doc_mean;
  };
  std::vector<double> run(const Sample &s, Trace *trace) const;
  std::vector<double> input_of(const Sample &s) const;

  std::size_t dense_dim_ = 0;
  std::size_t doc_dim_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<std::vector<double>> w_;
  std::vector<std::vector<double>> b_;
  std::vector<std::vector<double>> doc_rows_;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
};

struct TrainResult {
  Model model; // best-validation weights
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

/// Splits off `config.validation_fraction` of `samples` (seeded) and trains.
TrainResult train(const std::vector<Sample> &samples, std::size_t classes, std::size_t doc_dim,
                  std::size_t vocab_size, const TrainConfig &config);

/// Trains on `train_set`, monitoring `val_set` (or the training loss if it is
/// empty). Throws ConfigError if fewer than two classes are present, and
/// NumericError on a non-finite loss.
TrainResult train(const std::vector<Sample> &train_set, const std::vector<Sample> &val_set,
                  std::size_t classes, std::size_t doc_dim, std::size_t vocab_size,
                  const TrainConfig &config);

/// Maximum relative error between the analytic gradient and a central
/// difference with step 1e-5. `flip` negates one analytic component, for
/// testing that the check catches corrupted gradients.
double gradient_check(const Model &model, const std::vector<Sample> &batch,
                      std::optional<std::size_t> flip = std::nullopt);

// ---------------------------------------------------------------------------
// Classifiers over flows

/// Output classes per query family for sink prediction.
std::vector<SinkType> sink_classes(QueryFamily family);

/// P(class 1) is the unexpectedness score; Unexpected iff it exceeds 0.5.
Verdict binary_verdict(const std::vector<double> &probs);

/// score = 1 - P(s). Without a threshold the decision is Unexpected iff the
/// argmax (lowest index on ties) is not s; with one, iff score >= threshold.
Verdict sink_verdict(const std::vector<double> &probs, const std::vector<SinkType> &classes,
                     SinkType actual, std::optional<double> threshold = std::nullopt);

/// A trained network plus what is needed to featurize flows for it.
struct FlowClassifier {
  ModelKind kind = ModelKind::SinkPrediction;
  QueryFamily query = QueryFamily::Integrity;
  /// Sink type this binary model is responsible for; None for sink prediction.
  SinkType sink = SinkType::None;
  std::vector<SinkType> classes; // sink prediction only
  std::size_t embedding_dim = 0;
  DocVocabulary vocab;
  TrainConfig config;
  Model model;

  Sample sample(const EmbeddingTable &table, const FlowRecord &flow, int label = 0) const;
  Verdict classify(const EmbeddingTable &table, const FlowRecord &flow,
                   std::optional<double> threshold = std::nullopt) const;
};

/// Sink prediction over unlabeled corpus flows (their sink type is the class).
FlowClassifier train_sink_predictor(const EmbeddingTable &table,
                                    const std::vector<FlowRecord> &corpus, QueryFamily query,
                                    const TrainConfig &config, std::vector<EpochLog> *log = nullptr);

/// Binary classifier over labeled flows of one sink type.
FlowClassifier train_binary(const EmbeddingTable &table, const std::vector<LabeledFlow> &data,
                            SinkType sink, const TrainConfig &config,
                            std::vector<EpochLog> *log = nullptr);

constexpr int kModelVersion = 1;

std::string serialize(const FlowClassifier &c);
FlowClassifier parse_classifier(std::string_view text);
void save(const FlowClassifier &c, const std::string &path);
FlowClassifier load(const std::string &path);

} // namespace nlflow::mlp
