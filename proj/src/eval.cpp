// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/eval.hpp"

#include "nlflow/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace nlflow::eval {

using nlohmann::ordered_json;

void Confusion::add(Label predicted, Label actual) {
  bool p = predicted == Label::Unexpected, a = actual == Label::Unexpected;
  if (p && a)
    ++tp;
  else if (p)
    ++fp;
  else if (a)
    ++fn;
  else
    ++tn;
}

Confusion &Confusion::operator+=(const Confusion &o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Metrics precision_recall_f1(const Confusion &c) {
  Metrics m;
  if (c.tp + c.fp > 0)
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0)
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision + m.recall > 0)
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Sweep sweep_thresholds(const std::vector<std::pair<double, Label>> &scored) {
  if (std::none_of(scored.begin(), scored.end(),
                   [](const auto &s) { return s.second == Label::Unexpected; }))
    throw ValidationError("threshold sweep needs at least one Unexpected label");
  std::vector<double> thresholds;
  for (const auto &s : scored) {
    if (std::isnan(s.first))
      throw ValidationError("threshold sweep got a NaN score");
    thresholds.push_back(s.first);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  if (thresholds.empty() || !std::isinf(thresholds.back()) || thresholds.back() < 0)
    thresholds.push_back(std::numeric_limits<double>::infinity());

  Sweep out;
  bool have_best = false;
  for (double t : thresholds) {
    Confusion c;
    for (const auto &s : scored)
      c.add(s.first >= t ? Label::Unexpected : Label::Expected, s.second);
    Metrics m = precision_recall_f1(c);
    out.points.push_back({t, m.precision, m.recall, m.f1});
    if (!have_best || m.f1 > out.best.f1) {
      have_best = true;
      out.best = m;
      out.best_threshold = t;
      out.best_confusion = c;
    }
  }
  return out;
}

std::vector<Split> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2)
    throw ConfigError("k-fold needs k >= 2");
  if (n < k)
    throw ConfigError("k-fold with k = " + std::to_string(k) + " needs at least " +
                      std::to_string(k) + " items, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i)
    order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<Split> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= start && i < start + size)
        folds[f].test.push_back(order[i]);
      else
        folds[f].train.push_back(order[i]);
    }
    start += size;
  }
  return folds;
}

std::string_view to_string(Protocol p) {
  switch (p) {
  case Protocol::Sweep: return "sweep";
  case Protocol::KFold: return "kfold";
  case Protocol::Direct: return "direct";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "sweep")
    return Protocol::Sweep;
  if (text == "kfold")
    return Protocol::KFold;
  if (text == "direct")
    return Protocol::Direct;
  throw ConfigError("unknown protocol \"" + std::string(text) + "\" (sweep, kfold, direct)");
}

Protocol protocol_for(ModelKind kind) {
  switch (kind) {
  case ModelKind::SinkPrediction:
  case ModelKind::Novelty:
  case ModelKind::Frequency: return Protocol::Sweep;
  case ModelKind::Binary: return Protocol::KFold;
  case ModelKind::Llm:
  case ModelKind::Regex: return Protocol::Direct;
  }
  return Protocol::Direct;
}

namespace {

std::vector<SinkType> sinks_in(const std::vector<LabeledFlow> &data) {
  std::set<SinkType> s;
  for (const auto &lf : data)
    s.insert(lf.flow.sink_type);
  return {s.begin(), s.end()};
}

// Scores -> sweep, overall and per sink type.
EvalReport sweep_report(const std::vector<LabeledFlow> &data, const std::vector<double> &scores) {
  EvalReport r;
  r.n = data.size();
  std::vector<std::pair<double, Label>> all;
  for (std::size_t i = 0; i < data.size(); ++i)
    all.emplace_back(scores[i], data[i].label);
  Sweep s = sweep_thresholds(all);
  r.pr_points = s.points;
  r.best_threshold = s.best_threshold;
  r.metrics = s.best;
  r.confusion = s.best_confusion;
  for (SinkType t : sinks_in(data)) {
    SinkReport sr;
    sr.sink = t;
    std::vector<std::pair<double, Label>> mine;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i].flow.sink_type == t)
        mine.emplace_back(scores[i], data[i].label);
    sr.n = mine.size();
    bool has_pos = std::any_of(mine.begin(), mine.end(),
                               [](const auto &p) { return p.second == Label::Unexpected; });
    if (has_pos) {
      Sweep ss = sweep_thresholds(mine);
      sr.metrics = ss.best;
      sr.confusion = ss.best_confusion;
      sr.best_threshold = ss.best_threshold;
    } else {
      for (const auto &p : mine)
        sr.confusion.add(Label::Expected, p.second);
      r.warnings.push_back(std::string(to_string(t)) + ": no Unexpected labels, sweep skipped");
    }
    r.per_sink.push_back(sr);
  }
  return r;
}

EvalReport direct_report(const std::vector<LabeledFlow> &data,
                         const std::vector<Label> &predicted) {
  EvalReport r;
  r.n = data.size();
  std::map<SinkType, SinkReport> per;
  for (std::size_t i = 0; i < data.size(); ++i) {
    r.confusion.add(predicted[i], data[i].label);
    SinkReport &sr = per[data[i].flow.sink_type];
    sr.sink = data[i].flow.sink_type;
    ++sr.n;
    sr.confusion.add(predicted[i], data[i].label);
  }
  r.metrics = precision_recall_f1(r.confusion);
  for (auto &[t, sr] : per) {
    sr.metrics = precision_recall_f1(sr.confusion);
    r.per_sink.push_back(sr);
  }
  return r;
}

void require_embeddings(const EvalInputs &in) {
  if (!in.embeddings)
    throw ConfigError("this model needs an embedding table");
}

EvalReport eval_binary(const EvalInputs &in, const std::vector<LabeledFlow> &data) {
  auto splits = kfold(data.size(), in.folds, in.seed);
  EvalReport r;
  r.n = data.size();
  std::vector<Label> predicted(data.size(), Label::Expected);
  for (std::size_t f = 0; f < splits.size(); ++f) {
    std::vector<LabeledFlow> train_set;
    for (std::size_t i : splits[f].train)
      train_set.push_back(data[i]);
    std::map<SinkType, mlp::FlowClassifier> models;
    std::map<SinkType, Label> constant;
    for (SinkType t : sinks_in(data)) {
      std::set<Label> labels;
      for (const auto &lf : train_set)
        if (lf.flow.sink_type == t)
          labels.insert(lf.label);
      if (labels.size() == 2) {
        mlp::TrainConfig cfg = in.binary_config;
        cfg.seed = in.binary_config.seed + f;
        models.emplace(t, mlp::train_binary(*in.embeddings, train_set, t, cfg));
      } else {
        Label only = labels.empty() ? Label::Expected : *labels.begin();
        constant[t] = only;
        r.warnings.push_back("fold " + std::to_string(f) + ": " + std::string(to_string(t)) +
                             " training data has a single class; predicting " +
                             std::string(to_string(only)));
      }
    }
    FoldResult fr;
    fr.fold = f;
    for (std::size_t i : splits[f].test) {
      const FlowRecord &flow = data[i].flow;
      Label p;
      if (auto it = models.find(flow.sink_type); it != models.end())
        p = it->second.classify(*in.embeddings, flow).decision;
      else
        p = constant.at(flow.sink_type);
      predicted[i] = p;
      fr.confusion.add(p, data[i].label);
    }
    fr.metrics = precision_recall_f1(fr.confusion);
    r.folds.push_back(fr);
  }
  EvalReport d = direct_report(data, predicted);
  r.confusion = d.confusion;
  r.per_sink = d.per_sink;
  for (const auto &fr : r.folds) {
    r.metrics.precision += fr.metrics.precision;
    r.metrics.recall += fr.metrics.recall;
    r.metrics.f1 += fr.metrics.f1;
  }
  double k = static_cast<double>(r.folds.size());
  r.metrics.precision /= k;
  r.metrics.recall /= k;
  r.metrics.f1 /= k;
  return r;
}

EvalReport eval_llm(const EvalInputs &in, const std::vector<LabeledFlow> &data) {
  if (!in.client)
    throw ConfigError("LLM evaluation needs a completion client");
  std::vector<Label> predicted(data.size(), Label::Expected);
  std::vector<std::string> errors(data.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < data.size(); i = next++) {
      try {
        predicted[i] = llm::classify_flow(*in.client, in.llm_config, data, data[i].flow).decision;
      } catch (const std::exception &e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t n = std::max<std::size_t>(1, in.llm_config.max_in_flight);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!errors[i].empty())
      throw Error("flow " + data[i].flow.id + ": " + errors[i]);
  return direct_report(data, predicted);
}

} // namespace

EvalReport evaluate_model(ModelKind kind, Protocol protocol, const EvalInputs &in) {
  if (protocol != protocol_for(kind))
    throw ConfigError("model " + std::string(to_string(kind)) + " is evaluated with the " +
                      std::string(to_string(protocol_for(kind))) + " protocol, not " +
                      std::string(to_string(protocol)));
  std::vector<LabeledFlow> data;
  for (const auto &lf : in.labeled)
    if (lf.flow.family() == in.query && lf.flow.sink_type != SinkType::None)
      data.push_back(lf);
  if (data.empty())
    throw ConfigError("no labeled " + std::string(to_string(in.query)) + " flows to evaluate");

  EvalReport r;
  switch (kind) {
  case ModelKind::SinkPrediction: {
    require_embeddings(in);
    auto clf = mlp::train_sink_predictor(*in.embeddings, in.corpus, in.query, in.sink_config);
    std::vector<double> scores;
    for (const auto &lf : data)
      scores.push_back(clf.classify(*in.embeddings, lf.flow).score);
    r = sweep_report(data, scores);
    break;
  }
  case ModelKind::Novelty: {
    require_embeddings(in);
    std::vector<std::string> warnings;
    ocsvm::SeedSets seeds;
    for (const auto &lf : data)
      if (auto it = in.seeds.find(lf.flow.sink_type); it != in.seeds.end())
        seeds[it->first] = it->second;
    auto det = ocsvm::train_detector(*in.embeddings, seeds, in.gamma, in.nu, &warnings);
    std::vector<double> scores;
    for (const auto &lf : data)
      scores.push_back(det.classify(*in.embeddings, lf.flow).score);
    r = sweep_report(data, scores);
    r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
    break;
  }
  case ModelKind::Frequency: {
    if (in.query != QueryFamily::Integrity)
      throw ConfigError("frequency counting only applies to the integrity query");
    auto table = baselines::build_frequency_table(in.corpus);
    std::vector<double> scores;
    for (const auto &lf : data)
      scores.push_back(baselines::frequency_unexpectedness(table, lf.flow).score);
    r = sweep_report(data, scores);
    break;
  }
  case ModelKind::Regex: {
    if (in.query != QueryFamily::Confidentiality)
      throw ConfigError("the regular-expression baseline only applies to the logging query");
    std::vector<Label> predicted;
    for (const auto &lf : data)
      predicted.push_back(in.patterns.classify(lf.flow.source_name).decision);
    r = direct_report(data, predicted);
    break;
  }
  case ModelKind::Binary:
    require_embeddings(in);
    r = eval_binary(in, data);
    break;
  case ModelKind::Llm: r = eval_llm(in, data); break;
  }
  r.model = kind;
  r.protocol = protocol;
  r.query = in.query;
  return r;
}

namespace {

ordered_json threshold_json(double t) {
  if (std::isinf(t))
    return t > 0 ? "+inf" : "-inf";
  return t;
}

ordered_json confusion_json(const Confusion &c) {
  ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  return j;
}

void metrics_into(ordered_json &j, const Metrics &m) {
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
}

} // namespace

std::string report_json(const EvalReport &r, const std::string &generated_at) {
  ordered_json j;
  j["generated_at"] = generated_at;
  j["model"] = to_string(r.model);
  j["protocol"] = to_string(r.protocol);
  j["query"] = to_string(r.query);
  j["n"] = r.n;
  metrics_into(j, r.metrics);
  j["confusion"] = confusion_json(r.confusion);
  j["best_threshold"] = r.best_threshold ? threshold_json(*r.best_threshold) : ordered_json();
  ordered_json pts = ordered_json::array();
  for (const auto &p : r.pr_points) {
    ordered_json e;
    e["threshold"] = threshold_json(p.threshold);
    e["precision"] = p.precision;
    e["recall"] = p.recall;
    e["f1"] = p.f1;
    pts.push_back(std::move(e));
  }
  j["pr_points"] = pts;
  ordered_json folds = ordered_json::array();
  for (const auto &f : r.folds) {
    ordered_json e;
    e["fold"] = f.fold;
    metrics_into(e, f.metrics);
    e["confusion"] = confusion_json(f.confusion);
    folds.push_back(std::move(e));
  }
  j["folds"] = folds;
  ordered_json per = ordered_json::array();
  for (const auto &s : r.per_sink) {
    ordered_json e;
    e["sink_type"] = to_string(s.sink);
    e["n"] = s.n;
    metrics_into(e, s.metrics);
    e["confusion"] = confusion_json(s.confusion);
    e["best_threshold"] = s.best_threshold ? threshold_json(*s.best_threshold) : ordered_json();
    per.push_back(std::move(e));
  }
  j["per_sink"] = per;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::string pr_csv(const EvalReport &r) {
  std::ostringstream out;
  out.precision(17);
  out << "threshold,precision,recall,f1\n";
  for (const auto &p : r.pr_points) {
    if (std::isinf(p.threshold))
      out << "+inf";
    else
      out << p.threshold;
    out << ',' << p.precision << ',' << p.recall << ',' << p.f1 << '\n';
  }
  return out.str();
}

} // namespace nlflow::eval
