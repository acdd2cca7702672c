// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/embed.hpp"
#include "nlflow/ocsvm.hpp"

#include <cmath>
#include <numeric>

using namespace nlflow;
using namespace nlflow::ocsvm;

namespace {

const EmbeddingTable &toy() {
  static const EmbeddingTable t = load_embeddings(test::kDataDir + "/toy_embeddings.txt");
  return t;
}

} // namespace

TEST_CASE("rbf kernel") {
  CHECK(rbf({1, 2}, {1, 2}, 0.5) == 1.0);
  CHECK(rbf({0, 0}, {1, 1}, 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(rbf({0}, {0, 1}, 1), ValidationError);
}

TEST_CASE("a single seed gives alpha 1 and rho 1") {
  auto m = train({{0.3, -0.2}});
  REQUIRE(m.alphas.size() == 1);
  CHECK(m.alphas[0] == doctest::Approx(1));
  CHECK(m.rho == doctest::Approx(1));
  CHECK(decision_value(m, {0.3, -0.2}) == doctest::Approx(0).epsilon(1e-12));
  CHECK(decision_value(m, {0.31, -0.2}) < 0);
  CHECK(decision_value(m, {5, 5}) < 0);
}

TEST_CASE("three points match the brute-force oracle") {
  std::vector<std::vector<double>> x{{0, 0}, {1, 0.2}, {0.3, 1.4}};
  for (double nu : {0.01, 0.5, 0.9}) {
    CAPTURE(nu);
    auto m = train(x, 0.8, nu);
    auto oracle = test::brute_force_ocsvm(x, 0.8, nu);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(m.alphas[i] == doctest::Approx(oracle.alphas[i]).epsilon(1e-4));
    CHECK(m.rho == doctest::Approx(oracle.rho).epsilon(1e-4));
  }
}

TEST_CASE("dual constraints hold") {
  Rng rng(3);
  std::vector<std::vector<double>> x;
  for (int i = 0; i < 12; ++i)
    x.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  double nu = 0.3;
  auto m = train(x, 1.0, nu);
  double bound = 1.0 / (nu * static_cast<double>(x.size()));
  CHECK(std::accumulate(m.alphas.begin(), m.alphas.end(), 0.0) == doctest::Approx(1).epsilon(1e-6));
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(m.alphas[i] >= -1e-12);
    CHECK(m.alphas[i] <= bound + 1e-12);
    if (m.alphas[i] > 1e-6 && m.alphas[i] < bound - 1e-6)
      CHECK(std::abs(decision_value(m, x[i])) < 1e-5);
  }
}

TEST_CASE("bad parameters") {
  CHECK_THROWS_AS(train({{0, 0}}, 0.05, 0), ConfigError);
  CHECK_THROWS_AS(train({{0, 0}}, 0, 0.5), ConfigError);
  CHECK_THROWS_AS(train({}), ConfigError);
  CHECK_THROWS_AS(train({{0, 0}, {1}}), ConfigError);
}

TEST_CASE("decision values far away and under symmetry") {
  auto m = train({{-1, 0}, {1, 0}}, 0.5);
  CHECK(decision_value(m, {1e6, 1e6}) == doctest::Approx(-m.rho));
  CHECK(decision_value(m, {0, 2}) == doctest::Approx(decision_value(m, {0, -2})));
  CHECK(decision_value(m, {-3, 1}) == doctest::Approx(decision_value(m, {3, 1})));
}

TEST_CASE("polarity and thresholds") {
  auto m = train({{0, 0}});
  auto far = unexpectedness(m, {3, 0});
  CHECK(far.decision == Label::Unexpected);
  CHECK(far.score > 0);
  CHECK(unexpectedness(m, {0, 0}).decision == Label::Expected);
  CHECK(unexpectedness(m, {3, 0}, far.score + 0.01).decision == Label::Expected);
  CHECK(unexpectedness(m, {3, 0}, far.score).decision == Label::Unexpected);
  m.polarity = Polarity::InlierIsUnexpected;
  CHECK(unexpectedness(m, {0, 0}).decision == Label::Unexpected);
  CHECK(unexpectedness(m, {3, 0}).decision == Label::Expected);
  CHECK(parse_polarity(to_string(Polarity::InlierIsUnexpected)) == Polarity::InlierIsUnexpected);
}

TEST_CASE("seed sets") {
  const auto &seeds = default_seeds();
  CHECK(seeds.size() == 5);
  CHECK(seeds.at(SinkType::CmdInj) == std::vector<std::string>{"execute", "command"});
  CHECK(seeds.at(SinkType::Logging).size() == 4);
  for (const auto &[sink, names] : seeds) {
    CHECK(names.size() >= 1);
    CHECK(names.size() <= 16);
  }
  CHECK(parse_seeds(serialize_seeds(seeds)) == seeds);
  CHECK(load_seeds(test::kDataDir + "/seeds.json") == seeds);
  CHECK_THROWS_AS(parse_seeds("[1, 2]"), ConfigError);
}

TEST_CASE("detectors on the toy table") {
  std::vector<std::string> warnings;
  auto d = train_detector(toy(), default_seeds(), kDefaultGamma, kDefaultNu, &warnings);
  CHECK(d.models.size() == 5);
  CHECK(d.models.at(SinkType::Logging).polarity == Polarity::InlierIsUnexpected);
  CHECK(d.models.at(SinkType::CmdInj).polarity == Polarity::NovelIsUnexpected);

  auto command = d.classify(toy(), test::make_flow("command", SinkType::CmdInj));
  auto name = d.classify(toy(), test::make_flow("name", SinkType::CmdInj));
  CHECK(command.decision == Label::Expected);
  CHECK(name.decision == Label::Unexpected);
  CHECK(name.score > command.score);

  auto password = d.classify(toy(), test::make_flow("password", SinkType::Logging));
  CHECK(password.decision == Label::Unexpected);
  CHECK(password.model_kind == ModelKind::Novelty);

  CHECK_THROWS_AS(d.classify(toy(), test::make_flow("name", SinkType::None)), ValidationError);
}

TEST_CASE("out-of-vocabulary seeds are skipped") {
  SeedSets seeds{{SinkType::CmdInj, {"command", "qqqq"}}};
  std::vector<std::string> warnings;
  auto d = train_detector(toy(), seeds, kDefaultGamma, kDefaultNu, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(d.models.at(SinkType::CmdInj).support_vectors.size() == 1);
  CHECK_THROWS_AS(train_detector(toy(), {{SinkType::XSS, {"qqqq"}}}), ConfigError);
}

TEST_CASE("detectors round-trip through model files") {
  auto d = train_detector(toy(), default_seeds());
  test::TempDir dir("ocsvm");
  save_detector(d, dir.path.string());
  for (const char *s : {"CmdInj", "CodeInj", "XSS", "PathTrav", "Logging"})
    CHECK(std::filesystem::exists(dir.path / ("ocsvm_" + std::string(s) + ".json")));
  auto back = load_detector(dir.path.string());
  for (const char *n : {"name", "command", "cwd", "html"}) {
    auto f = test::make_flow(n, SinkType::PathTrav);
    CHECK(back.classify(toy(), f).score == d.classify(toy(), f).score);
  }
  std::size_t dim = 0;
  auto text = serialize(d.models.at(SinkType::XSS), d.embedding_dim);
  auto m = parse_model(text, &dim);
  CHECK(dim == 8);
  CHECK(m.rho == d.models.at(SinkType::XSS).rho);
  auto j = nlohmann::json::parse(text);
  j["version"] = 0;
  CHECK_THROWS_AS(parse_model(j.dump()), VersionError);
  CHECK_THROWS_AS(parse_model("{"), ModelError);
}
