// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/mlp.hpp"

#include "nlflow/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace nlflow::mlp {

using nlohmann::json;
using nlohmann::ordered_json;

TrainConfig TrainConfig::binary() {
  TrainConfig c;
  c.batch_size = 32;
  c.patience = 50;
  return c;
}

TrainConfig TrainConfig::sink_prediction() {
  TrainConfig c;
  c.batch_size = 256;
  c.patience = 2;
  c.validation_fraction = 0.1;
  return c;
}

ordered_json to_json(const TrainConfig &c) {
  ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["patience"] = c.patience;
  j["validation_fraction"] = c.validation_fraction;
  j["seed"] = c.seed;
  j["max_epochs"] = c.max_epochs;
  j["class_weights"] = c.class_weights;
  j["hidden"] = c.hidden;
  return j;
}

TrainConfig train_config_from_json(const json &j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.seed = j.value("seed", c.seed);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.class_weights = j.value("class_weights", c.class_weights);
  c.hidden = j.value("hidden", c.hidden);
  return c;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(std::size_t dense_dim, std::size_t doc_dim, std::size_t vocab_size,
             const std::vector<std::size_t> &hidden, std::size_t classes)
    : dense_dim_(dense_dim), doc_dim_(doc_dim) {
  if (classes < 2)
    throw ConfigError("a classifier needs at least two output classes");
  if (dense_dim + doc_dim == 0)
    throw ConfigError("model input dimension must be positive");
  dims_.push_back(dense_dim + doc_dim);
  for (std::size_t h : hidden) {
    if (h == 0)
      throw ConfigError("hidden layer sizes must be positive");
    dims_.push_back(h);
  }
  dims_.push_back(classes);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    w_.emplace_back(dims_[l + 1] * dims_[l], 0.0);
    b_.emplace_back(dims_[l + 1], 0.0);
  }
  if (doc_dim > 0)
    doc_rows_.assign(std::max<std::size_t>(vocab_size, 1), std::vector<double>(doc_dim, 0.0));
}

void Model::init_random(Rng &rng) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    double limit = std::sqrt(6.0 / static_cast<double>(dims_[l] + dims_[l + 1]));
    for (double &x : w_[l])
      x = rng.uniform(-limit, limit);
    std::fill(b_[l].begin(), b_[l].end(), 0.0);
  }
  if (!doc_rows_.empty()) {
    double limit = std::sqrt(6.0 / static_cast<double>(doc_rows_.size() + doc_dim_));
    for (auto &row : doc_rows_)
      for (double &x : row)
        x = rng.uniform(-limit, limit);
  }
}

std::vector<double> Model::input_of(const Sample &s) const {
  if (s.dense.size() != dense_dim_)
    throw ValidationError("model expects a dense input of length " + std::to_string(dense_dim_) +
                          ", got " + std::to_string(s.dense.size()));
  std::vector<double> x = s.dense;
  if (doc_dim_ > 0) {
    for (int id : s.doc)
      if (id < 0 || static_cast<std::size_t>(id) >= doc_rows_.size())
        throw ValidationError("doc token id " + std::to_string(id) + " is out of range");
    auto mean = embed_doc(doc_rows_, doc_dim_, s.doc);
    x.insert(x.end(), mean.begin(), mean.end());
  }
  return x;
}

std::vector<double> Model::run(const Sample &s, Trace *trace) const {
  std::vector<double> a = input_of(s);
  if (trace)
    trace->act.push_back(a);
  for (std::size_t l = 0; l < w_.size(); ++l) {
    std::size_t in = dims_[l], out = dims_[l + 1];
    std::vector<double> z(b_[l]);
    const double *w = w_[l].data();
    for (std::size_t o = 0; o < out; ++o) {
      double acc = z[o];
      const double *row = w + o * in;
      for (std::size_t i = 0; i < in; ++i)
        acc += row[i] * a[i];
      z[o] = acc;
    }
    if (l + 1 < w_.size())
      for (double &v : z)
        v = v > 0 ? v : 0.0;
    a = std::move(z);
    if (trace)
      trace->act.push_back(a);
  }
  // Softmax over the logits in `a`.
  double mx = *std::max_element(a.begin(), a.end());
  double sum = 0;
  for (double &v : a) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double &v : a)
    v /= sum;
  return a;
}

std::vector<double> Model::forward(const Sample &s) const { return run(s, nullptr); }

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l)
    n += w_[l].size() + b_[l].size();
  return n + doc_rows_.size() * doc_dim_;
}

double Model::parameter(std::size_t i) const {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    if (i < w_[l].size())
      return w_[l][i];
    i -= w_[l].size();
    if (i < b_[l].size())
      return b_[l][i];
    i -= b_[l].size();
  }
  return doc_rows_.at(i / doc_dim_).at(i % doc_dim_);
}

void Model::set_parameter(std::size_t i, double v) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    if (i < w_[l].size()) {
      w_[l][i] = v;
      return;
    }
    i -= w_[l].size();
    if (i < b_[l].size()) {
      b_[l][i] = v;
      return;
    }
    i -= b_[l].size();
  }
  doc_rows_.at(i / doc_dim_).at(i % doc_dim_) = v;
}

void Model::apply_update(const std::vector<double> &delta) {
  std::size_t k = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (double &x : w_[l])
      x += delta[k++];
    for (double &x : b_[l])
      x += delta[k++];
  }
  for (auto &row : doc_rows_)
    for (double &x : row)
      x += delta[k++];
}

double Model::loss(const std::vector<Sample> &batch, const std::vector<double> &class_weights,
                   std::vector<double> *grad) const {
  if (grad)
    grad->assign(parameter_count(), 0.0);
  double total = 0, weight_sum = 0;
  std::vector<std::size_t> offsets; // start of W[l] in the flat vector
  std::size_t doc_offset = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    offsets.push_back(doc_offset);
    doc_offset += w_[l].size() + b_[l].size();
  }
  for (const auto &s : batch) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= classes())
      throw ValidationError("label " + std::to_string(s.label) + " is out of range");
    double cw = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(s.label)];
    weight_sum += cw;
  }
  if (weight_sum <= 0)
    return 0;
  for (const auto &s : batch) {
    double cw = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(s.label)];
    Trace trace;
    std::vector<double> p = run(s, grad ? &trace : nullptr);
    double py = std::max(p[static_cast<std::size_t>(s.label)], 1e-300);
    total += -cw * std::log(py);
    if (!grad)
      continue;
    double scale = cw / weight_sum;
    std::vector<double> delta(p.size());
    for (std::size_t c = 0; c < p.size(); ++c)
      delta[c] = scale * (p[c] - (static_cast<int>(c) == s.label ? 1.0 : 0.0));
    for (std::size_t l = w_.size(); l-- > 0;) {
      std::size_t in = dims_[l], out = dims_[l + 1];
      const std::vector<double> &a_prev = trace.act[l];
      double *gw = grad->data() + offsets[l];
      double *gb = gw + w_[l].size();
      std::vector<double> d_prev(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        double d = delta[o];
        if (d == 0)
          continue;
        gb[o] += d;
        double *grow = gw + o * in;
        const double *wrow = w_[l].data() + o * in;
        for (std::size_t i = 0; i < in; ++i) {
          grow[i] += d * a_prev[i];
          d_prev[i] += d * wrow[i];
        }
      }
      if (l > 0)
        for (std::size_t i = 0; i < in; ++i)
          if (a_prev[i] <= 0)
            d_prev[i] = 0;
      delta = std::move(d_prev);
    }
    if (doc_dim_ > 0 && !s.doc.empty()) {
      double share = 1.0 / static_cast<double>(s.doc.size());
      for (int id : s.doc) {
        double *g = grad->data() + doc_offset + static_cast<std::size_t>(id) * doc_dim_;
        for (std::size_t i = 0; i < doc_dim_; ++i)
          g[i] += share * delta[dense_dim_ + i];
      }
    }
  }
  return total / weight_sum;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::vector<double> inverse_frequency(const std::vector<Sample> &data, std::size_t classes) {
  std::vector<double> counts(classes, 0.0);
  for (const auto &s : data)
    counts[static_cast<std::size_t>(s.label)] += 1;
  std::size_t present = 0;
  for (double c : counts)
    present += c > 0;
  std::vector<double> w(classes, 1.0);
  for (std::size_t c = 0; c < classes; ++c)
    if (counts[c] > 0)
      w[c] = static_cast<double>(data.size()) / (static_cast<double>(present) * counts[c]);
  return w;
}

struct Adam {
  std::vector<double> m, v;
  std::size_t t = 0;
  double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  Adam(std::size_t n, double rate) : m(n, 0.0), v(n, 0.0), lr(rate) {}

  std::vector<double> step(const std::vector<double> &g) {
    ++t;
    double c1 = 1 - std::pow(b1, static_cast<double>(t));
    double c2 = 1 - std::pow(b2, static_cast<double>(t));
    std::vector<double> delta(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      double mh = m[i] / c1, vh = v[i] / c2;
      delta[i] = -lr * mh / (std::sqrt(vh) + eps);
    }
    return delta;
  }
};

} // namespace

TrainResult train(const std::vector<Sample> &samples, std::size_t classes, std::size_t doc_dim,
                  std::size_t vocab_size, const TrainConfig &config) {
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  Rng split_rng(config.seed ^ 0x5eedf00dULL);
  split_rng.shuffle(order);
  auto n_val = static_cast<std::size_t>(config.validation_fraction * static_cast<double>(samples.size()));
  std::vector<Sample> tr, val;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_val ? val : tr).push_back(samples[order[i]]);
  return train(tr, val, classes, doc_dim, vocab_size, config);
}

TrainResult train(const std::vector<Sample> &train_set, const std::vector<Sample> &val_set,
                  std::size_t classes, std::size_t doc_dim, std::size_t vocab_size,
                  const TrainConfig &config) {
  if (train_set.empty())
    throw ConfigError("training set is empty");
  std::set<int> present;
  for (const auto &s : train_set) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= classes)
      throw ValidationError("label " + std::to_string(s.label) + " is out of range");
    present.insert(s.label);
  }
  if (present.size() < 2)
    throw ConfigError("training data must contain at least two classes");
  if (config.batch_size == 0 || config.learning_rate <= 0 || config.max_epochs == 0)
    throw ConfigError("batch size, learning rate and epoch cap must be positive");

  Rng rng(config.seed);
  TrainResult result;
  result.model = Model(train_set[0].dense.size(), doc_dim, vocab_size, config.hidden, classes);
  result.model.init_random(rng);
  Model &model = result.model;
  Model best = model;
  std::vector<double> weights =
      config.class_weights ? inverse_frequency(train_set, classes) : std::vector<double>{};
  Adam adam(model.parameter_count(), config.learning_rate);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<double> grad;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::vector<Sample> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i)
        batch.push_back(train_set[order[i]]);
      double l = model.loss(batch, weights, &grad);
      if (!std::isfinite(l))
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
      model.apply_update(adam.step(grad));
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = model.loss(train_set, weights, nullptr);
    entry.val_loss = val_set.empty() ? entry.train_loss : model.loss(val_set, weights, nullptr);
    if (!std::isfinite(entry.train_loss) || !std::isfinite(entry.val_loss))
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
    result.log.push_back(entry);
    if (entry.val_loss < best_loss) {
      best_loss = entry.val_loss;
      best = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  result.model = std::move(best);
  return result;
}

double gradient_check(const Model &model, const std::vector<Sample> &batch,
                      std::optional<std::size_t> flip) {
  std::vector<double> analytic;
  model.loss(batch, {}, &analytic);
  if (flip && *flip < analytic.size())
    analytic[*flip] = -analytic[*flip];
  const double h = 1e-5;
  Model probe = model;
  double worst = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    double orig = probe.parameter(i);
    probe.set_parameter(i, orig + h);
    double up = probe.loss(batch, {}, nullptr);
    probe.set_parameter(i, orig - h);
    double down = probe.loss(batch, {}, nullptr);
    probe.set_parameter(i, orig);
    double numeric = (up - down) / (2 * h);
    double err = std::abs(analytic[i] - numeric) /
                 std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
    worst = std::max(worst, err);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Flow classifiers

std::vector<SinkType> sink_classes(QueryFamily family) {
  if (family == QueryFamily::Integrity)
    return {SinkType::CmdInj, SinkType::CodeInj, SinkType::XSS, SinkType::PathTrav,
            SinkType::None};
  return {SinkType::Logging, SinkType::None};
}

Verdict binary_verdict(const std::vector<double> &probs) {
  if (probs.size() != 2)
    throw ValidationError("binary verdict needs two probabilities");
  Verdict v;
  v.model_kind = ModelKind::Binary;
  v.score = probs[1];
  v.decision = probs[1] > 0.5 ? Label::Unexpected : Label::Expected;
  return v;
}

Verdict sink_verdict(const std::vector<double> &probs, const std::vector<SinkType> &classes,
                     SinkType actual, std::optional<double> threshold) {
  if (actual == SinkType::None)
    throw ValidationError("sink prediction is never queried for None flows");
  if (probs.size() != classes.size())
    throw ValidationError("probability vector does not match the class list");
  auto it = std::find(classes.begin(), classes.end(), actual);
  if (it == classes.end())
    throw ValidationError("sink type " + std::string(to_string(actual)) +
                          " is not a class of this model");
  std::size_t s = static_cast<std::size_t>(it - classes.begin());
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[argmax])
      argmax = i;
  Verdict v;
  v.model_kind = ModelKind::SinkPrediction;
  v.score = 1.0 - probs[s];
  if (threshold)
    v.decision = v.score >= *threshold ? Label::Unexpected : Label::Expected;
  else
    v.decision = argmax == s ? Label::Expected : Label::Unexpected;
  return v;
}

Sample FlowClassifier::sample(const EmbeddingTable &table, const FlowRecord &flow,
                              int label) const {
  if (table.dim != embedding_dim)
    throw ConfigError("embedding table has dimension " + std::to_string(table.dim) +
                      " but the model was trained with " + std::to_string(embedding_dim));
  FeatureVector f = featurize(table, model.doc_dim() > 0 ? &vocab : nullptr, flow);
  Sample s;
  s.dense = dense_input(f, query);
  s.doc = std::move(f.doc_ids);
  s.label = label;
  return s;
}

Verdict FlowClassifier::classify(const EmbeddingTable &table, const FlowRecord &flow,
                                 std::optional<double> threshold) const {
  if (flow.family() != query)
    throw ValidationError("flow " + flow.id + " belongs to the other query family");
  auto probs = model.forward(sample(table, flow));
  if (kind == ModelKind::Binary)
    return binary_verdict(probs);
  return sink_verdict(probs, classes, flow.sink_type, threshold);
}

namespace {

std::size_t doc_dim_for(QueryFamily q, std::size_t k) {
  return q == QueryFamily::Integrity ? k : 0;
}

std::vector<std::optional<std::string>> docs_of(const std::vector<FlowRecord> &flows) {
  std::vector<std::optional<std::string>> docs;
  for (const auto &f : flows)
    docs.push_back(f.doc_comment);
  return docs;
}

} // namespace

FlowClassifier train_sink_predictor(const EmbeddingTable &table,
                                    const std::vector<FlowRecord> &corpus, QueryFamily query,
                                    const TrainConfig &config, std::vector<EpochLog> *log) {
  FlowClassifier c;
  c.kind = ModelKind::SinkPrediction;
  c.query = query;
  c.classes = sink_classes(query);
  c.embedding_dim = table.dim;
  c.config = config;
  std::vector<FlowRecord> flows;
  for (const auto &f : corpus)
    if (f.family() == query)
      flows.push_back(f);
  if (flows.empty())
    throw ConfigError("no " + std::string(to_string(query)) + " flows to train on");
  std::size_t doc_dim = doc_dim_for(query, table.dim);
  if (doc_dim > 0)
    c.vocab = DocVocabulary::build(docs_of(flows));
  c.model = Model(query == QueryFamily::Integrity ? 2 * table.dim : table.dim, doc_dim,
                  c.vocab.size(), config.hidden, c.classes.size());
  std::vector<Sample> samples;
  for (const auto &f : flows) {
    auto it = std::find(c.classes.begin(), c.classes.end(), f.sink_type);
    samples.push_back(c.sample(table, f, static_cast<int>(it - c.classes.begin())));
  }
  TrainResult r = train(samples, c.classes.size(), doc_dim, c.vocab.size(), config);
  c.model = std::move(r.model);
  if (log)
    *log = std::move(r.log);
  return c;
}

FlowClassifier train_binary(const EmbeddingTable &table, const std::vector<LabeledFlow> &data,
                            SinkType sink, const TrainConfig &config,
                            std::vector<EpochLog> *log) {
  FlowClassifier c;
  c.kind = ModelKind::Binary;
  c.sink = sink;
  c.query = sink == SinkType::Logging ? QueryFamily::Confidentiality : QueryFamily::Integrity;
  c.embedding_dim = table.dim;
  c.config = config;
  std::vector<const LabeledFlow *> mine;
  for (const auto &lf : data)
    if (lf.flow.sink_type == sink)
      mine.push_back(&lf);
  if (mine.empty())
    throw ConfigError("no labeled " + std::string(to_string(sink)) + " flows to train on");
  std::size_t doc_dim = doc_dim_for(c.query, table.dim);
  if (doc_dim > 0) {
    std::vector<std::optional<std::string>> docs;
    for (const auto *lf : mine)
      docs.push_back(lf->flow.doc_comment);
    c.vocab = DocVocabulary::build(docs);
  }
  c.model = Model(c.query == QueryFamily::Integrity ? 2 * table.dim : table.dim, doc_dim,
                  c.vocab.size(), config.hidden, 2);
  std::vector<Sample> samples;
  for (const auto *lf : mine)
    samples.push_back(c.sample(table, lf->flow, lf->label == Label::Unexpected ? 1 : 0));
  TrainResult r = train(samples, 2, doc_dim, c.vocab.size(), config);
  c.model = std::move(r.model);
  if (log)
    *log = std::move(r.log);
  return c;
}

// ---------------------------------------------------------------------------
// Persistence

std::string serialize(const FlowClassifier &c) {
  ordered_json j;
  j["version"] = kModelVersion;
  j["kind"] = to_string(c.kind);
  j["query"] = to_string(c.query);
  j["sink"] = to_string(c.sink);
  j["layer_dims"] = c.model.layer_dims();
  j["dense_dim"] = c.model.dense_dim();
  j["doc_dim"] = c.model.doc_dim();
  j["weights"] = c.model.weights();
  j["biases"] = c.model.biases();
  j["config"] = to_json(c.config);
  j["embedding_dim"] = c.embedding_dim;
  ordered_json classes = ordered_json::array();
  for (SinkType s : c.classes)
    classes.push_back(to_string(s));
  j["classes"] = classes;
  j["doc_vocab"] = c.vocab.tokens();
  j["doc_embeddings"] = c.model.doc_rows();
  return j.dump() + "\n";
}

FlowClassifier parse_classifier(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ModelError(std::string("corrupt model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version"))
    throw ModelError("corrupt model file: missing version");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kModelVersion)
    throw VersionError("unsupported model version " + j["version"].dump() + " (expected " +
                       std::to_string(kModelVersion) + ")");
  try {
    FlowClassifier c;
    c.kind = parse_model_kind(j.at("kind").get<std::string>());
    if (c.kind != ModelKind::Binary && c.kind != ModelKind::SinkPrediction)
      throw ModelError("not a neural model: kind " + j.at("kind").get<std::string>());
    c.query = parse_query_family(j.at("query").get<std::string>());
    c.sink = parse_sink_type(j.at("sink").get<std::string>());
    auto dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    auto dense_dim = j.at("dense_dim").get<std::size_t>();
    auto doc_dim = j.at("doc_dim").get<std::size_t>();
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.config = train_config_from_json(j.at("config"));
    for (const auto &s : j.at("classes"))
      c.classes.push_back(parse_sink_type(s.get<std::string>()));
    c.vocab = DocVocabulary(j.at("doc_vocab").get<std::vector<std::string>>());
    if (dims.size() < 2 || dims.front() != dense_dim + doc_dim)
      throw ModelError("corrupt model file: inconsistent layer_dims");
    std::vector<std::size_t> hidden(dims.begin() + 1, dims.end() - 1);
    c.model = Model(dense_dim, doc_dim, c.vocab.size(), hidden, dims.back());
    auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
    auto biases = j.at("biases").get<std::vector<std::vector<double>>>();
    auto rows = j.at("doc_embeddings").get<std::vector<std::vector<double>>>();
    if (weights.size() != c.model.weights().size() || biases.size() != c.model.biases().size())
      throw ModelError("corrupt model file: wrong number of layers");
    for (std::size_t l = 0; l < weights.size(); ++l)
      if (weights[l].size() != c.model.weights()[l].size() ||
          biases[l].size() != c.model.biases()[l].size())
        throw ModelError("corrupt model file: layer " + std::to_string(l) + " has the wrong shape");
    if (rows.size() != c.model.doc_rows().size() ||
        std::any_of(rows.begin(), rows.end(), [&](const auto &r) { return r.size() != doc_dim; }))
      throw ModelError("corrupt model file: doc embeddings have the wrong shape");
    c.model.weights() = std::move(weights);
    c.model.biases() = std::move(biases);
    c.model.doc_rows() = std::move(rows);
    if (c.kind == ModelKind::SinkPrediction && c.classes.size() != dims.back())
      throw ModelError("corrupt model file: class list does not match the output layer");
    return c;
  } catch (const json::exception &e) {
    throw ModelError(std::string("corrupt model file: ") + e.what());
  } catch (const ValidationError &e) {
    throw ModelError(std::string("corrupt model file: ") + e.what());
  }
}

void save(const FlowClassifier &c, const std::string &path) { write_file(path, serialize(c)); }

FlowClassifier load(const std::string &path) { return parse_classifier(read_file(path)); }

} // namespace nlflow::mlp
