// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/embed.hpp"
#include "nlflow/mlp.hpp"

#include <cmath>
#include <numeric>

using namespace nlflow;
using namespace nlflow::mlp;

namespace {

double sum(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Model random_model(std::size_t in, std::size_t doc_dim, std::size_t vocab,
                   std::vector<std::size_t> hidden, std::size_t classes, std::uint64_t seed) {
  Model m(in, doc_dim, vocab, hidden, classes);
  Rng rng(seed);
  m.init_random(rng);
  for (auto &b : m.biases())
    for (auto &x : b)
      x = rng.uniform(-0.5, 0.5);
  return m;
}

std::vector<Sample> blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    int label = static_cast<int>(i % 2);
    double cx = label ? 1.0 : -1.0;
    out.push_back({{cx + rng.uniform(-0.4, 0.4), rng.uniform(-1, 1)}, {}, label});
  }
  return out;
}

TrainConfig quick(std::size_t epochs = 200) {
  TrainConfig c;
  c.hidden = {8};
  c.max_epochs = epochs;
  c.learning_rate = 0.01;
  c.batch_size = 8;
  c.validation_fraction = 0;
  c.patience = epochs;
  return c;
}

} // namespace

TEST_CASE("a zero model predicts the uniform distribution") {
  Model m(3, 0, 0, {4}, 2);
  auto p = m.forward({{0.3, -2, 5}, {}, 0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("adding a constant to all output biases leaves the output unchanged") {
  Model m = random_model(3, 0, 0, {5}, 3, 11);
  Sample s{{0.2, -0.7, 1.1}, {}, 0};
  auto before = m.forward(s);
  for (auto &b : m.biases().back())
    b += 3.5;
  auto after = m.forward(s);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
}

TEST_CASE("forward gives probability vectors") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Model m = random_model(4, 3, 6, {7, 5}, 5, 100 + trial);
    Sample s{{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)},
             {1, 4},
             0};
    auto p = m.forward(s);
    CHECK(std::abs(sum(p) - 1) < 1e-9);
    for (double x : p)
      CHECK(x >= 0);
  }
  Model m(2, 0, 0, {3}, 2);
  CHECK_THROWS_AS(m.forward({{1, 2, 3}, {}, 0}), ValidationError);
}

TEST_CASE("gradient check") {
  Model m = random_model(3, 2, 4, {6, 4}, 3, 21);
  std::vector<Sample> batch{{{0.5, -1, 0.25}, {1, 2}, 0},
                            {{-0.3, 0.8, 1.2}, {3}, 2},
                            {{1.1, 0.1, -0.6}, {}, 1}};
  CHECK(gradient_check(m, batch) < 1e-4);
  std::size_t flip = 2;
  CHECK(gradient_check(m, batch, flip) > 1e-1);

  Model zero(3, 0, 0, {4}, 2);
  std::vector<Sample> balanced{{{0, 0, 0}, {}, 0}, {{0, 0, 0}, {}, 1}};
  double err = gradient_check(zero, balanced);
  CHECK(std::isfinite(err));
}

TEST_CASE("training separates linearly separable data") {
  auto data = blobs(50, 3);
  auto result = train(data, 2, 0, 0, quick(500));
  std::size_t correct = 0;
  for (const auto &s : data) {
    auto p = result.model.forward(s);
    correct += (p[1] > p[0]) == (s.label == 1);
  }
  CHECK(correct == data.size());
}

TEST_CASE("training is reproducible") {
  auto data = blobs(30, 4);
  TrainConfig c = quick(50);
  c.validation_fraction = 0.2;
  c.seed = 9;
  auto a = train(data, 2, 0, 0, c);
  auto b = train(data, 2, 0, 0, c);
  CHECK(a.model.weights() == b.model.weights());
  CHECK(a.model.biases() == b.model.biases());
  c.seed = 10;
  auto d = train(data, 2, 0, 0, c);
  CHECK(d.model.weights() != a.model.weights());
}

TEST_CASE("single-class data is rejected") {
  std::vector<Sample> data{{{1, 0}, {}, 1}, {{0, 1}, {}, 1}, {{1, 1}, {}, 1}};
  CHECK_THROWS_AS(train(data, 2, 0, 0, quick(5)), ConfigError);
}

TEST_CASE("early stopping on a plateau") {
  std::vector<Sample> data{{{0, 0}, {}, 0}, {{0, 0}, {}, 1}};
  TrainConfig c = quick(1000);
  c.patience = 20;
  c.batch_size = 2;
  auto r = train(data, data, 2, 0, 0, c);
  CHECK(r.early_stopped);
  CHECK(r.log.size() == 21);
}

TEST_CASE("binary verdicts") {
  auto v = binary_verdict({0.9, 0.1});
  CHECK(v.decision == Label::Expected);
  CHECK(v.score == doctest::Approx(0.1));
  CHECK(binary_verdict({0.1, 0.9}).decision == Label::Unexpected);
  CHECK(binary_verdict({0.5, 0.5}).decision == Label::Expected);
}

TEST_CASE("sink-prediction verdicts") {
  auto classes = sink_classes(QueryFamily::Integrity);
  REQUIRE(classes.size() == 5);
  CHECK(classes.front() == SinkType::CmdInj);
  CHECK(classes.back() == SinkType::None);

  auto a = sink_verdict({0.9, 0.025, 0.025, 0.025, 0.025}, classes, SinkType::CmdInj);
  CHECK(a.decision == Label::Expected);
  CHECK(a.score == doctest::Approx(0.1));

  auto b = sink_verdict({0.1, 0.025, 0.025, 0.05, 0.8}, classes, SinkType::CmdInj);
  CHECK(b.decision == Label::Unexpected);
  CHECK(b.score == doctest::Approx(0.9));

  auto u = sink_verdict({0.2, 0.2, 0.2, 0.2, 0.2}, classes, SinkType::CmdInj);
  CHECK(u.score == doctest::Approx(0.8));
  CHECK(u.decision == Label::Expected);
  auto u2 = sink_verdict({0.2, 0.2, 0.2, 0.2, 0.2}, classes, SinkType::XSS);
  CHECK(u2.decision == Label::Unexpected);

  CHECK(sink_verdict({0.2, 0.2, 0.2, 0.2, 0.2}, classes, SinkType::CmdInj, 0.8).decision ==
        Label::Unexpected);
  CHECK(sink_verdict({0.2, 0.2, 0.2, 0.2, 0.2}, classes, SinkType::CmdInj, 0.81).decision ==
        Label::Expected);
  CHECK_THROWS_AS(sink_verdict({0.2, 0.2, 0.2, 0.2, 0.2}, classes, SinkType::None), ValidationError);
}

TEST_CASE("train configs serialize") {
  TrainConfig c = TrainConfig::binary();
  c.seed = 123;
  c.hidden = {7, 3};
  auto back = train_config_from_json(to_json(c));
  CHECK(back.seed == 123);
  CHECK(back.hidden == std::vector<std::size_t>{7, 3});
  CHECK(back.patience == c.patience);
  CHECK(back.class_weights == c.class_weights);
}

TEST_CASE("flow classifiers round-trip through their file format") {
  auto table = load_embeddings(test::kDataDir + "/toy_embeddings.txt");
  std::vector<FlowRecord> corpus;
  const char *cmd[] = {"command", "cmd", "execute", "script"};
  const char *path[] = {"file", "path", "directory", "source"};
  std::int64_t line = 1;
  for (const char *n : cmd)
    corpus.push_back(test::make_flow(n, SinkType::CmdInj, std::string("run"),
                                     std::string("Runs a command."), line += 3));
  for (const char *n : path)
    corpus.push_back(test::make_flow(n, SinkType::PathTrav, std::string("read"), std::nullopt,
                                     line += 3));
  TrainConfig c = TrainConfig::sink_prediction();
  c.hidden = {6};
  c.max_epochs = 30;
  c.validation_fraction = 0;
  std::vector<EpochLog> log;
  auto clf = train_sink_predictor(table, corpus, QueryFamily::Integrity, c, &log);
  CHECK(!log.empty());
  CHECK(clf.kind == ModelKind::SinkPrediction);

  auto back = parse_classifier(serialize(clf));
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    Sample s;
    for (std::size_t d = 0; d < clf.model.dense_dim(); ++d)
      s.dense.push_back(rng.uniform(-1, 1));
    s.doc = {static_cast<int>(rng.below(clf.model.vocab_size()))};
    CHECK(back.model.forward(s) == clf.model.forward(s));
  }
  for (const auto &f : corpus)
    CHECK(back.classify(table, f).score == clf.classify(table, f).score);

  std::string text = serialize(clf);
  CHECK_THROWS_AS(parse_classifier(text.substr(0, text.size() / 2)), ModelError);
  auto j = nlohmann::json::parse(text);
  j["version"] = 0;
  CHECK_THROWS_AS(parse_classifier(j.dump()), VersionError);
}

TEST_CASE("binary classifier over labeled flows") {
  auto table = load_embeddings(test::kDataDir + "/toy_embeddings.txt");
  std::vector<LabeledFlow> data;
  std::int64_t line = 1;
  for (const char *n : {"command", "cmd", "execute"})
    data.push_back({test::make_flow(n, SinkType::CmdInj, std::nullopt, std::nullopt, line += 3),
                    Label::Expected});
  for (const char *n : {"name", "locale", "count"})
    data.push_back({test::make_flow(n, SinkType::CmdInj, std::nullopt, std::nullopt, line += 3),
                    Label::Unexpected});
  TrainConfig c = TrainConfig::binary();
  c.hidden = {8};
  c.max_epochs = 300;
  c.validation_fraction = 0;
  c.learning_rate = 0.01;
  auto clf = train_binary(table, data, SinkType::CmdInj, c);
  CHECK(clf.kind == ModelKind::Binary);
  CHECK(clf.sink == SinkType::CmdInj);
  for (const auto &lf : data)
    CHECK(clf.classify(table, lf.flow).decision == lf.label);
  CHECK_THROWS_AS(train_binary(table, data, SinkType::XSS, c), ConfigError);
}
