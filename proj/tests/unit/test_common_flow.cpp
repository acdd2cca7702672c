// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/common.hpp"
#include "nlflow/flow.hpp"

#include <set>
#include <sstream>

using namespace nlflow;
using nlflow::test::make_flow;

TEST_CASE("rng is reproducible and bounded") {
  Rng a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(3) < 3);
  }
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xff) == "00000000000000ff");
}

TEST_CASE("utf8 length counts scalar values") {
  CHECK(utf8_length("ab") == 2);
  CHECK(utf8_length("\xc3\xa9") == 1);
  CHECK(utf8_length("\xe2\x82\xac" "x") == 2);
}

TEST_CASE("enum strings round-trip") {
  for (SinkType t : {SinkType::CmdInj, SinkType::CodeInj, SinkType::XSS, SinkType::PathTrav,
                     SinkType::Logging, SinkType::None})
    CHECK(parse_sink_type(to_string(t)) == t);
  for (ModelKind m : {ModelKind::Binary, ModelKind::SinkPrediction, ModelKind::Novelty,
                      ModelKind::Llm, ModelKind::Frequency, ModelKind::Regex})
    CHECK(parse_model_kind(to_string(m)) == m);
  CHECK(to_string(Label::Unexpected) == "unexpected");
  CHECK(parse_query_family("confidentiality") == QueryFamily::Confidentiality);
  CHECK_THROWS_AS(parse_sink_type("SQLi"), ValidationError);
}

TEST_CASE("parse_flows on an empty stream gives no records") {
  CHECK(parse_flows(std::string_view("")).empty());
  CHECK(parse_flows(std::string_view("\n\n")).empty());
}

TEST_CASE("one CmdInj line parses into a matching record") {
  FlowRecord f = make_flow("cmd", SinkType::CmdInj, "run", std::string("Runs it."), 4);
  auto flows = parse_flows(serialize(f) + "\n");
  REQUIRE(flows.size() == 1);
  CHECK(flows[0] == f);
  CHECK(flows[0].family() == QueryFamily::Integrity);
  CHECK(serialize_flows(flows) == serialize(f) + "\n");
}

TEST_CASE("a one-character source name is rejected with the length rule") {
  FlowRecord f = make_flow("cm", SinkType::CmdInj);
  std::string line = serialize(f);
  auto at = line.find("\"cm\"");
  REQUIRE(at != std::string::npos);
  line.replace(at, 4, "\"x\"");
  try {
    parse_flows(line);
    FAIL("expected a validation error");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("two characters") != std::string::npos);
  }
}

TEST_CASE("malformed JSON carries its line number") {
  std::string text = serialize(make_flow("cmd", SinkType::CmdInj)) + "\n{oops\n";
  try {
    parse_flows(text);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("record invariants") {
  FlowRecord f = make_flow("cmd", SinkType::CmdInj);
  CHECK_NOTHROW(validate(f));

  FlowRecord no_fn = f;
  no_fn.function_name.reset();
  CHECK_THROWS_AS(validate(no_fn), ValidationError);

  FlowRecord logged = make_flow("password", SinkType::Logging);
  CHECK(logged.family() == QueryFamily::Confidentiality);
  CHECK_NOTHROW(validate(logged));
  FlowRecord bad = logged;
  bad.sink_type = SinkType::CmdInj;
  CHECK_THROWS_AS(validate(bad), ValidationError);

  FlowRecord none = make_flow("cmd", SinkType::None);
  CHECK_NOTHROW(validate(none));
  none.sink_line = 3;
  CHECK_THROWS_AS(validate(none), ValidationError);
}

TEST_CASE("duplicate ids are rejected") {
  std::string line = serialize(make_flow("cmd", SinkType::CmdInj));
  CHECK_THROWS_AS(parse_flows(line + "\n" + line + "\n"), ValidationError);
}

TEST_CASE("flow ids depend on every identity field") {
  FlowRecord a = make_flow("cmd", SinkType::CmdInj);
  std::set<std::string> ids{a.id};
  FlowRecord b = a;
  b.line = 9;
  ids.insert(compute_flow_id(b));
  b = a;
  b.sink_type = SinkType::XSS;
  ids.insert(compute_flow_id(b));
  b = a;
  b.sink_line = 40;
  ids.insert(compute_flow_id(b));
  b = a;
  b.project = "q";
  ids.insert(compute_flow_id(b));
  CHECK(ids.size() == 5);
  b = a;
  b.doc_comment = "changes nothing";
  CHECK(compute_flow_id(b) == a.id);
}

TEST_CASE("short-name filter keeps order") {
  CHECK(filter_short_names({make_flow("cmd", SinkType::CmdInj)}).size() == 1);
  FlowRecord p = make_flow("pp", SinkType::CmdInj);
  p.source_name = "p";
  CHECK(filter_short_names({p}).empty());

  std::vector<FlowRecord> mixed;
  for (const char *n : {"aa", "b", "cc", "d", "ee"}) {
    FlowRecord f = make_flow("zz", SinkType::CmdInj, std::nullopt, std::nullopt,
                             static_cast<std::int64_t>(mixed.size() + 1));
    f.source_name = n;
    mixed.push_back(f);
  }
  auto kept = filter_short_names(mixed);
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].source_name == "aa");
  CHECK(kept[1].source_name == "cc");
  CHECK(kept[2].source_name == "ee");
}

TEST_CASE("labels join by id") {
  FlowRecord a = make_flow("cmd", SinkType::CmdInj, std::nullopt, std::nullopt, 1);
  FlowRecord b = make_flow("name", SinkType::CmdInj, std::nullopt, std::nullopt, 5);
  std::vector<LabeledFlow> labeled{{a, Label::Expected}};
  auto labels = parse_labels(serialize_labels(labeled));
  REQUIRE(labels.size() == 1);
  CHECK(labels.at(a.id) == Label::Expected);

  auto joined = join_labels({a, b}, labels);
  REQUIRE(joined.size() == 1);
  CHECK(joined[0].flow == a);
  auto rest = unlabeled({a, b}, labels);
  REQUIRE(rest.size() == 1);
  CHECK(rest[0] == b);

  labels["feedfacefeedface"] = Label::Unexpected;
  CHECK_THROWS_AS(join_labels({a, b}, labels), ValidationError);

  std::string dup = "{\"flow_id\":\"x1\",\"label\":\"expected\"}\n"
                    "{\"flow_id\":\"x1\",\"label\":\"unexpected\"}\n";
  CHECK_THROWS_AS(parse_labels(dup), ValidationError);
}
