// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/cli.hpp"

#include "nlflow/baselines.hpp"
#include "nlflow/embed.hpp"
#include "nlflow/eval.hpp"
#include "nlflow/flow.hpp"
#include "nlflow/llm.hpp"
#include "nlflow/mlp.hpp"
#include "nlflow/ocsvm.hpp"
#include "nlflow/report.hpp"
#include "nlflow/taint.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace nlflow {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string root;
  std::string query = "integrity";
  std::string model;
  std::string embeddings = std::string(NLFLOW_DATA_DIR) + "/toy_embeddings.txt";
  std::string sinks;
  std::string seeds;
  std::string patterns;
  double threshold = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::vector<std::string> sanitizers;
  std::string project;
  std::string flows;
  std::string labels;
  std::string corpus;
  std::string protocol;
  std::string endpoint;
  std::vector<std::size_t> hidden;
  std::size_t epochs = 0;
  std::size_t folds = 5;
  unsigned workers = 0;
  std::string csv;
  double gamma = ocsvm::kDefaultGamma;
  double nu = ocsvm::kDefaultNu;
  std::size_t shots = 10;
  std::size_t max_in_flight = 1;
};

struct Context {
  Options opt;
  bool has_threshold = false;
  std::ostream *out;
  std::ostream *err;
};

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require(const std::string &value, const std::string &flag, const std::string &why) {
  if (value.empty())
    throw ConfigError(flag + " is required " + why);
}

void write_output(const Context &c, const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    *c.out << text;
    return;
  }
  fs::path p(path);
  if (p.has_parent_path())
    fs::create_directories(p.parent_path());
  write_file(path, text);
}

std::string log_csv(const std::vector<mlp::EpochLog> &log) {
  std::ostringstream s;
  s.precision(17);
  s << "epoch,train_loss,val_loss\n";
  for (const auto &e : log)
    s << e.epoch << ',' << e.train_loss << ',' << e.val_loss << '\n';
  return s.str();
}

EmbeddingTable load_table(const Context &c) {
  std::vector<std::string> warnings;
  EmbeddingTable t = load_embeddings(c.opt.embeddings, &warnings);
  for (const auto &w : warnings)
    *c.err << "warning: " << w << '\n';
  return t;
}

ocsvm::SeedSets seeds_of(const Options &o) {
  return o.seeds.empty() ? ocsvm::default_seeds() : ocsvm::load_seeds(o.seeds);
}

baselines::RegexClassifier patterns_of(const Options &o) {
  return o.patterns.empty() ? baselines::RegexClassifier() : baselines::load_patterns(o.patterns);
}

mlp::TrainConfig config_for(const Options &o, mlp::TrainConfig base) {
  base.seed = o.seed;
  if (!o.hidden.empty())
    base.hidden = o.hidden;
  if (o.epochs)
    base.max_epochs = o.epochs;
  return base;
}

llm::PromptConfig llm_config_of(const Options &o, llm::PromptConfig base = {}) {
  if (!o.endpoint.empty())
    base.endpoint = o.endpoint;
  base.shots = o.shots;
  base.seed = o.seed;
  base.max_in_flight = o.max_in_flight;
  if (const char *key = std::getenv(llm::kApiKeyEnv))
    base.api_key = key;
  return base;
}

std::vector<LabeledFlow> labeled_of(const Options &o) {
  require(o.flows, "--flows", "for labeled data");
  require(o.labels, "--labels", "for this model kind");
  return join_labels(load_flows(o.flows), load_labels(o.labels));
}

std::vector<FlowRecord> family_flows(const std::vector<FlowRecord> &flows, QueryFamily q) {
  std::vector<FlowRecord> kept;
  for (const auto &f : flows)
    if (f.family() == q)
      kept.push_back(f);
  return kept;
}

std::vector<LabeledFlow> family_labeled(const std::vector<LabeledFlow> &flows, QueryFamily q) {
  std::vector<LabeledFlow> kept;
  for (const auto &f : flows)
    if (f.flow.family() == q)
      kept.push_back(f);
  return kept;
}

// ---------------------------------------------------------------------------
// scan

int cmd_scan(const Context &c) {
  const Options &o = c.opt;
  taint::TaintConfig cfg;
  if (!o.sinks.empty())
    cfg.sinks = taint::load_sink_catalog(o.sinks);
  cfg.sanitizers = o.sanitizers;
  taint::ScanOptions so;
  so.project = o.project;
  so.workers = o.workers;
  auto res = taint::scan_project(o.root, parse_query_family(o.query), cfg, so);
  for (const auto &d : res.diagnostics)
    *c.err << d.file << ':' << d.line << ':' << d.column << ": " << d.message << '\n';
  write_output(c, o.out, serialize_flows(res.flows));

  std::map<SinkType, std::size_t> counts;
  for (const auto &f : res.flows)
    ++counts[f.sink_type];
  std::ostream &summary = o.out.empty() || o.out == "-" ? *c.err : *c.out;
  summary << "files: " << res.files_scanned << "\nflows: " << res.flows.size() << '\n';
  for (const auto &[sink, n] : counts)
    summary << "  " << to_string(sink) << ": " << n << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const Context &c) {
  const Options &o = c.opt;
  ModelKind kind = parse_model_kind(o.model);
  QueryFamily query = parse_query_family(o.query);
  require(o.out, "--out", "to store the model");
  switch (kind) {
  case ModelKind::SinkPrediction: {
    require(o.flows, "--flows", "(unlabeled corpus including None flows) for sink prediction");
    EmbeddingTable table = load_table(c);
    std::vector<mlp::EpochLog> log;
    auto clf = mlp::train_sink_predictor(table, family_flows(load_flows(o.flows), query), query,
                                         config_for(o, mlp::TrainConfig::sink_prediction()), &log);
    write_output(c, o.out, mlp::serialize(clf));
    write_output(c, o.out + ".log.csv", log_csv(log));
    break;
  }
  case ModelKind::Binary: {
    if (o.labels.empty())
      throw ConfigError("binary classifiers need labeled flows: pass --flows and --labels");
    EmbeddingTable table = load_table(c);
    auto data = family_labeled(labeled_of(o), query);
    std::set<SinkType> sinks;
    for (const auto &lf : data)
      if (lf.flow.sink_type != SinkType::None)
        sinks.insert(lf.flow.sink_type);
    if (sinks.empty())
      throw ConfigError("no labeled " + o.query + " flows to train on");
    fs::create_directories(o.out);
    for (SinkType s : sinks) {
      std::set<Label> classes;
      for (const auto &lf : data)
        if (lf.flow.sink_type == s)
          classes.insert(lf.label);
      if (classes.size() < 2) {
        *c.err << "warning: " << to_string(s)
               << " has labels of a single class; no binary model trained for it\n";
        continue;
      }
      std::vector<mlp::EpochLog> log;
      auto clf = mlp::train_binary(table, data, s, config_for(o, mlp::TrainConfig::binary()), &log);
      std::string base = o.out + "/binary_" + std::string(to_string(s));
      write_file(base + ".json", mlp::serialize(clf));
      write_file(base + ".log.csv", log_csv(log));
    }
    break;
  }
  case ModelKind::Novelty: {
    EmbeddingTable table = load_table(c);
    std::vector<std::string> warnings;
    auto det = ocsvm::train_detector(table, seeds_of(o), o.gamma, o.nu, &warnings);
    for (const auto &w : warnings)
      *c.err << "warning: " << w << '\n';
    ocsvm::save_detector(det, o.out);
    std::ostringstream log;
    log.precision(17);
    log << "sink,support_vectors,rho\n";
    for (const auto &[sink, m] : det.models)
      log << to_string(sink) << ',' << m.support_vectors.size() << ',' << m.rho << '\n';
    write_file(o.out + "/training_log.csv", log.str());
    break;
  }
  case ModelKind::Frequency: {
    require(o.flows, "--flows", "(corpus) for the frequency baseline");
    auto table = baselines::build_frequency_table(
        family_flows(load_flows(o.flows), QueryFamily::Integrity));
    write_output(c, o.out, baselines::serialize(table));
    break;
  }
  case ModelKind::Regex:
    write_output(c, o.out, baselines::serialize_patterns(patterns_of(o)));
    break;
  case ModelKind::Llm: {
    if (o.labels.empty())
      throw ConfigError("the few-shot model needs labeled example flows: pass --flows and --labels");
    llm::LlmArtifact a;
    a.query = query;
    a.config = llm_config_of(o);
    a.config.api_key.clear();
    a.pool = family_labeled(labeled_of(o), query);
    write_output(c, o.out, llm::serialize(a));
    break;
  }
  }
  *c.out << "trained " << to_string(kind) << " model -> " << o.out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// Loading any stored model

struct LoadedModel {
  ModelKind kind = ModelKind::Novelty;
  std::optional<QueryFamily> query;
  std::optional<mlp::FlowClassifier> sink;
  std::map<SinkType, mlp::FlowClassifier> binary;
  std::optional<ocsvm::Detector> novelty;
  std::optional<baselines::FrequencyTable> frequency;
  std::optional<baselines::RegexClassifier> regex;
  std::optional<llm::LlmArtifact> llm;
};

LoadedModel load_any(const std::string &path) {
  LoadedModel m;
  if (fs::is_directory(path)) {
    bool any_ocsvm = false, any_binary = false;
    for (const auto &e : fs::directory_iterator(path)) {
      std::string name = e.path().filename().string();
      any_ocsvm |= name.rfind("ocsvm_", 0) == 0;
      if (name.rfind("binary_", 0) == 0 && e.path().extension() == ".json") {
        any_binary = true;
        auto clf = mlp::load(e.path().string());
        m.query = clf.query;
        m.binary.emplace(clf.sink, std::move(clf));
      }
    }
    if (any_ocsvm && !any_binary) {
      m.kind = ModelKind::Novelty;
      m.novelty = ocsvm::load_detector(path);
    } else if (any_binary && !any_ocsvm) {
      m.kind = ModelKind::Binary;
    } else {
      throw ModelError(path + " holds no recognizable model files");
    }
    return m;
  }
  std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ModelError(path + ": not JSON: " + e.what());
  }
  if (!j.is_object())
    throw ModelError(path + ": model file must be a JSON object");
  std::string kind = j.value("kind", std::string());
  if (kind == "sink" || kind == "binary") {
    auto clf = mlp::parse_classifier(text);
    m.query = clf.query;
    if (clf.kind == ModelKind::Binary) {
      m.kind = ModelKind::Binary;
      m.binary.emplace(clf.sink, std::move(clf));
    } else {
      m.kind = ModelKind::SinkPrediction;
      m.sink = std::move(clf);
    }
  } else if (kind == "frequency") {
    m.kind = ModelKind::Frequency;
    m.query = QueryFamily::Integrity;
    m.frequency = baselines::parse_frequency_table(text);
  } else if (kind == "llm") {
    m.kind = ModelKind::Llm;
    m.llm = llm::parse_artifact(text);
    m.query = m.llm->query;
  } else if (kind == "ocsvm") {
    throw ModelError(path + ": pass the directory holding the OC-SVM models");
  } else if (j.contains("sensitive") || j.contains("filter")) {
    m.kind = ModelKind::Regex;
    m.query = QueryFamily::Confidentiality;
    m.regex = baselines::parse_patterns(text);
  } else {
    throw ModelError(path + ": unknown model kind \"" + kind + "\"");
  }
  return m;
}

bool thresholded(ModelKind k) {
  return k == ModelKind::SinkPrediction || k == ModelKind::Novelty || k == ModelKind::Frequency;
}

/// Scores every applicable flow. Flows the model cannot judge (None flows,
/// other families, sinks without a model) are skipped with a warning.
std::vector<report::ClassifiedFlow> score_flows(const Context &c, const LoadedModel &m,
                                                QueryFamily query,
                                                const std::vector<FlowRecord> &flows,
                                                std::optional<double> threshold) {
  std::optional<EmbeddingTable> table;
  if (m.kind == ModelKind::SinkPrediction || m.kind == ModelKind::Binary ||
      m.kind == ModelKind::Novelty)
    table = load_table(c);
  std::unique_ptr<llm::HttpCompletionClient> client;
  llm::PromptConfig llm_cfg;
  if (m.llm) {
    client = std::make_unique<llm::HttpCompletionClient>();
    llm_cfg = llm_config_of(c.opt, m.llm->config);
    if (c.opt.endpoint.empty())
      llm_cfg.endpoint = m.llm->config.endpoint;
  }
  std::vector<report::ClassifiedFlow> out;
  std::size_t skipped = 0;
  for (const auto &f : flows) {
    if (f.family() != query || f.sink_type == SinkType::None) {
      ++skipped;
      continue;
    }
    report::ClassifiedFlow cf{f, {}};
    switch (m.kind) {
    case ModelKind::SinkPrediction: cf.verdict = m.sink->classify(*table, f, threshold); break;
    case ModelKind::Binary: {
      auto it = m.binary.find(f.sink_type);
      if (it == m.binary.end()) {
        ++skipped;
        continue;
      }
      cf.verdict = it->second.classify(*table, f);
      break;
    }
    case ModelKind::Novelty:
      if (!m.novelty->models.count(f.sink_type)) {
        ++skipped;
        continue;
      }
      cf.verdict = m.novelty->classify(*table, f, threshold);
      break;
    case ModelKind::Frequency:
      cf.verdict = baselines::frequency_unexpectedness(*m.frequency, f, threshold);
      break;
    case ModelKind::Regex: cf.verdict = m.regex->classify(f.source_name); break;
    case ModelKind::Llm: cf.verdict = llm::classify_flow(*client, llm_cfg, m.llm->pool, f); break;
    }
    out.push_back(std::move(cf));
  }
  if (skipped)
    *c.err << "note: " << skipped << " flow(s) not applicable to this model were skipped\n";
  return out;
}

// ---------------------------------------------------------------------------
// classify

int cmd_classify(const Context &c) {
  const Options &o = c.opt;
  require(o.model, "--model", "(path of a trained model)");
  require(o.flows, "--flows", "(flows to classify)");
  LoadedModel m = load_any(o.model);
  if (thresholded(m.kind) && !c.has_threshold)
    throw ConfigError(std::string(to_string(m.kind)) + " models need --threshold");
  if (!thresholded(m.kind) && c.has_threshold)
    throw ConfigError(std::string(to_string(m.kind)) + " models take no --threshold");
  QueryFamily query = m.query.value_or(parse_query_family(o.query));
  std::optional<double> threshold;
  if (c.has_threshold)
    threshold = o.threshold;
  auto scored = score_flows(c, m, query, load_flows(o.flows), threshold);
  auto rep = report::make_report(m.kind, query, threshold, scored);
  if (o.format == "sarif")
    write_output(c, o.out, report::to_sarif(rep));
  else if (o.format == "json")
    write_output(c, o.out, report::to_json(rep, utc_now()));
  else
    throw ConfigError("--format must be json or sarif");
  if (!o.out.empty() && o.out != "-")
    *c.out << rep.unexpected.size() << " unexpected of " << rep.total << " classified flows\n";
  return rep.unexpected.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// eval and sweep

void write_report(const Context &c, const eval::EvalReport &r) {
  for (const auto &w : r.warnings)
    *c.err << "warning: " << w << '\n';
  write_output(c, c.opt.out, eval::report_json(r, utc_now()));
  if (!c.opt.csv.empty())
    write_output(c, c.opt.csv, eval::pr_csv(r));
  if (!c.opt.out.empty() && c.opt.out != "-") {
    std::ostringstream s;
    s.precision(4);
    s << std::fixed << to_string(r.model) << " (" << to_string(r.protocol) << ", n=" << r.n
      << "): precision " << r.metrics.precision << " recall " << r.metrics.recall << " f1 "
      << r.metrics.f1 << '\n';
    *c.out << s.str();
  }
}

int cmd_eval(const Context &c) {
  const Options &o = c.opt;
  require(o.model, "--model", "(model kind)");
  ModelKind kind = parse_model_kind(o.model);
  eval::Protocol protocol =
      o.protocol.empty() ? eval::protocol_for(kind) : eval::parse_protocol(o.protocol);
  if (protocol != eval::protocol_for(kind))
    throw ConfigError("model " + o.model + " is evaluated with the " +
                      std::string(eval::to_string(eval::protocol_for(kind))) + " protocol, not " +
                      std::string(eval::to_string(protocol)));
  eval::EvalInputs in;
  in.query = parse_query_family(o.query);
  in.labeled = labeled_of(o);
  if (kind == ModelKind::SinkPrediction || kind == ModelKind::Frequency) {
    require(o.corpus, "--corpus", "(unlabeled training flows) for " + o.model);
    in.corpus = family_flows(load_flows(o.corpus), in.query);
  }
  std::optional<EmbeddingTable> table;
  if (kind == ModelKind::SinkPrediction || kind == ModelKind::Binary ||
      kind == ModelKind::Novelty) {
    table = load_table(c);
    in.embeddings = &*table;
  }
  in.seeds = seeds_of(o);
  in.gamma = o.gamma;
  in.nu = o.nu;
  in.patterns = patterns_of(o);
  in.sink_config = config_for(o, mlp::TrainConfig::sink_prediction());
  in.binary_config = config_for(o, mlp::TrainConfig::binary());
  in.folds = o.folds;
  in.seed = o.seed;
  llm::HttpCompletionClient client;
  in.client = &client;
  in.llm_config = llm_config_of(o);
  write_report(c, eval::evaluate_model(kind, protocol, in));
  return 0;
}

int cmd_sweep(const Context &c) {
  const Options &o = c.opt;
  require(o.model, "--model", "(path of a trained thresholded model)");
  LoadedModel m = load_any(o.model);
  if (!thresholded(m.kind))
    throw ConfigError(std::string(to_string(m.kind)) + " models produce no scores to sweep");
  QueryFamily query = m.query.value_or(parse_query_family(o.query));
  auto labeled = labeled_of(o);
  std::map<std::string, Label> label_of;
  std::vector<FlowRecord> flows;
  for (const auto &lf : labeled) {
    label_of[lf.flow.id] = lf.label;
    flows.push_back(lf.flow);
  }
  auto scored = score_flows(c, m, query, flows, std::nullopt);
  std::vector<std::pair<double, Label>> pairs;
  for (const auto &s : scored)
    pairs.emplace_back(s.verdict.score, label_of.at(s.flow.id));
  eval::Sweep sw = eval::sweep_thresholds(pairs);
  eval::EvalReport r;
  r.model = m.kind;
  r.protocol = eval::Protocol::Sweep;
  r.query = query;
  r.n = pairs.size();
  r.metrics = sw.best;
  r.confusion = sw.best_confusion;
  r.best_threshold = sw.best_threshold;
  r.pr_points = sw.points;
  write_report(c, r);
  return 0;
}

// ---------------------------------------------------------------------------

void add_query(CLI::App *sub, Options &o) {
  sub->add_option("--query", o.query, "integrity or confidentiality")
      ->check(CLI::IsMember({"integrity", "confidentiality"}));
}

void add_embedding_opts(CLI::App *sub, Options &o) {
  sub->add_option("--embeddings", o.embeddings, "word-vector table (text format)");
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  Context c;
  c.out = &out;
  c.err = &err;
  Options &o = c.opt;

  CLI::App app("nlflow: taint flows filtered by natural-language cues", "nlflow");
  app.require_subcommand(1);

  auto *scan = app.add_subcommand("scan", "Extract source-sink flows from a JavaScript project");
  scan->add_option("root", o.root, "project directory")->required();
  add_query(scan, o);
  scan->add_option("--sinks", o.sinks, "sink catalog JSON");
  scan->add_option("--sanitizers", o.sanitizers, "callee patterns whose results are clean")
      ->delimiter(',');
  scan->add_option("--project", o.project, "project name recorded in flows");
  scan->add_option("--workers", o.workers, "analysis threads (0 = all cores)");
  scan->add_option("--out", o.out, "flows.jsonl destination (default stdout)");

  auto *train = app.add_subcommand("train", "Train and store a model");
  train->add_option("--model", o.model, "binary, sink, novelty, frequency, regex or llm")->required();
  add_query(train, o);
  add_embedding_opts(train, o);
  train->add_option("--flows", o.flows, "flows.jsonl");
  train->add_option("--labels", o.labels, "labels.jsonl");
  train->add_option("--seeds", o.seeds, "seed-name JSON for novelty models");
  train->add_option("--patterns", o.patterns, "pattern JSON for the regex baseline");
  train->add_option("--seed", o.seed, "random seed");
  train->add_option("--hidden", o.hidden, "hidden layer sizes")->delimiter(',');
  train->add_option("--epochs", o.epochs, "maximum epochs");
  train->add_option("--gamma", o.gamma, "RBF kernel width");
  train->add_option("--nu", o.nu, "OC-SVM nu");
  train->add_option("--endpoint", o.endpoint, "completion endpoint stored with llm models");
  train->add_option("--shots", o.shots, "examples per prompt");
  train->add_option("--out", o.out, "model file or directory")->required();

  auto *classify = app.add_subcommand("classify", "Report unexpected flows");
  classify->add_option("--model", o.model, "trained model file or directory")->required();
  classify->add_option("--flows", o.flows, "flows.jsonl")->required();
  classify->add_option("--threshold", o.threshold, "decision threshold (thresholded models)");
  add_query(classify, o);
  add_embedding_opts(classify, o);
  classify->add_option("--endpoint", o.endpoint, "completion endpoint override");
  classify->add_option("--max-in-flight", o.max_in_flight, "concurrent completion requests");
  classify->add_option("--format", o.format, "json or sarif")
      ->check(CLI::IsMember({"json", "sarif"}));
  classify->add_option("--out", o.out, "report destination (default stdout)");

  auto *evaluate = app.add_subcommand("eval", "Evaluate a model kind on labeled flows");
  evaluate->add_option("--model", o.model, "model kind")->required();
  evaluate->add_option("--protocol", o.protocol, "sweep, kfold or direct (default: the kind's)");
  add_query(evaluate, o);
  add_embedding_opts(evaluate, o);
  evaluate->add_option("--flows", o.flows, "flows.jsonl")->required();
  evaluate->add_option("--labels", o.labels, "labels.jsonl")->required();
  evaluate->add_option("--corpus", o.corpus, "unlabeled training flows");
  evaluate->add_option("--seeds", o.seeds, "seed-name JSON");
  evaluate->add_option("--patterns", o.patterns, "pattern JSON");
  evaluate->add_option("--seed", o.seed, "random seed");
  evaluate->add_option("--folds", o.folds, "k for k-fold");
  evaluate->add_option("--hidden", o.hidden, "hidden layer sizes")->delimiter(',');
  evaluate->add_option("--epochs", o.epochs, "maximum epochs");
  evaluate->add_option("--gamma", o.gamma, "RBF kernel width");
  evaluate->add_option("--nu", o.nu, "OC-SVM nu");
  evaluate->add_option("--endpoint", o.endpoint, "completion endpoint");
  evaluate->add_option("--shots", o.shots, "examples per prompt");
  evaluate->add_option("--max-in-flight", o.max_in_flight, "concurrent completion requests");
  evaluate->add_option("--out", o.out, "report JSON destination (default stdout)");
  evaluate->add_option("--csv", o.csv, "PR points as CSV");

  auto *sweep = app.add_subcommand("sweep", "Sweep thresholds of a trained model over labeled flows");
  sweep->add_option("--model", o.model, "trained model file or directory")->required();
  add_query(sweep, o);
  add_embedding_opts(sweep, o);
  sweep->add_option("--flows", o.flows, "flows.jsonl")->required();
  sweep->add_option("--labels", o.labels, "labels.jsonl")->required();
  sweep->add_option("--out", o.out, "report JSON destination (default stdout)");
  sweep->add_option("--csv", o.csv, "PR points as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  c.has_threshold = classify->count("--threshold") > 0;

  try {
    if (scan->parsed())
      return cmd_scan(c);
    if (train->parsed())
      return cmd_train(c);
    if (classify->parsed())
      return cmd_classify(c);
    if (evaluate->parsed())
      return cmd_eval(c);
    if (sweep->parsed())
      return cmd_sweep(c);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  std::vector<const char *> argv;
  argv.push_back("nlflow");
  for (const auto &a : args)
    argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace nlflow
