// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/baselines.hpp"

using namespace nlflow;
using namespace nlflow::baselines;
using test::make_flow;

TEST_CASE("frequency tables are exact tallies") {
  std::vector<FlowRecord> corpus{make_flow("cmd", SinkType::CmdInj, {}, {}, 1),
                                 make_flow("cmd", SinkType::CmdInj, {}, {}, 5),
                                 make_flow("name", SinkType::CmdInj, {}, {}, 9)};
  auto t = build_frequency_table(corpus);
  CHECK(t.counts.size() == 2);
  CHECK(t.count("cmd", SinkType::CmdInj) == 2);
  CHECK(t.count("name", SinkType::CmdInj) == 1);
  CHECK(t.count("name", SinkType::XSS) == 0);
  CHECK(build_frequency_table({}).counts.empty());

  auto cased = build_frequency_table(
      {make_flow("Cmd", SinkType::CmdInj, {}, {}, 1), make_flow("cmd", SinkType::CmdInj, {}, {}, 5)});
  CHECK(cased.count("Cmd", SinkType::CmdInj) == 1);
  CHECK(cased.count("cmd", SinkType::CmdInj) == 1);
}

TEST_CASE("frequency unexpectedness") {
  FrequencyTable t;
  t.counts[{"cmd", SinkType::CmdInj}] = 50;
  auto v = frequency_unexpectedness(t, make_flow("cmd", SinkType::CmdInj), 1.0 / 6.0);
  CHECK(v.decision == Label::Expected);
  CHECK(v.score == doctest::Approx(1.0 / 51.0));
  CHECK(v.raw_count == std::optional<std::int64_t>(50));
  CHECK(v.model_kind == ModelKind::Frequency);

  auto unseen = frequency_unexpectedness(t, make_flow("zz", SinkType::CmdInj), 0.999);
  CHECK(unseen.score == 1.0);
  CHECK(unseen.decision == Label::Unexpected);

  CHECK_THROWS_AS(frequency_unexpectedness(t, make_flow("password", SinkType::Logging)),
                  ValidationError);
  CHECK_THROWS_AS(frequency_unexpectedness(t, make_flow("cmd", SinkType::None)), ValidationError);
}

TEST_CASE("frequency tables serialize") {
  auto t = build_frequency_table({make_flow("cmd", SinkType::CmdInj, {}, {}, 1),
                                  make_flow("path", SinkType::PathTrav, {}, {}, 5)});
  CHECK(parse_frequency_table(serialize(t)) == t);
  CHECK_THROWS_AS(parse_frequency_table("nope"), ModelError);
}

TEST_CASE("regex baseline") {
  RegexClassifier c;
  CHECK(c.classify("password").decision == Label::Unexpected);
  CHECK(c.classify("password").score == 1.0);
  CHECK(c.classify("passwordHash").decision == Label::Expected);
  CHECK(c.classify("passcode").decision == Label::Unexpected);
  CHECK(c.classify("apiToken").decision == Label::Unexpected);
  CHECK(c.classify("AUTH_KEY").decision == Label::Unexpected);
  CHECK(c.classify("count").decision == Label::Expected);
  CHECK(c.classify("count").score == 0.0);
  CHECK(c.classify("encodedSecret").decision == Label::Expected);
}

TEST_CASE("pattern files") {
  auto c = parse_patterns(R"({"sensitive": ["pin"]})");
  CHECK(c.is_sensitive("userPin"));
  CHECK_FALSE(c.is_sensitive("password"));
  CHECK(c.filter_patterns() == RegexClassifier::default_filter());
  CHECK_THROWS_AS(parse_patterns(R"({"sensitive": ["("]})"), ConfigError);
  CHECK_THROWS_AS(parse_patterns(R"({"other": []})"), ConfigError);
  auto defaults = load_patterns(test::kDataDir + "/patterns.json");
  CHECK(defaults.sensitive_patterns() == RegexClassifier::default_sensitive());
  CHECK(serialize_patterns(parse_patterns(serialize_patterns(c))) == serialize_patterns(c));
}
