// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/report.hpp"

using namespace nlflow;
using namespace nlflow::report;
using test::make_flow;

namespace {

std::vector<ClassifiedFlow> sample() {
  Verdict hit{Label::Unexpected, 0.9, ModelKind::Novelty, std::nullopt};
  Verdict miss{Label::Expected, 0.1, ModelKind::Novelty, std::nullopt};
  return {{make_flow("name", SinkType::CmdInj, std::string("locale"), std::nullopt, 3), hit},
          {make_flow("command", SinkType::CmdInj, std::string("run"), std::nullopt, 9), miss},
          {make_flow("path", SinkType::PathTrav, std::string("read"), std::nullopt, 20), hit}};
}

} // namespace

TEST_CASE("reports keep unexpected verdicts in order") {
  auto r = make_report(ModelKind::Novelty, QueryFamily::Integrity, 0.1, sample());
  CHECK(r.total == 3);
  REQUIRE(r.unexpected.size() == 2);
  CHECK(r.unexpected[0].flow.source_name == "name");
  CHECK(r.unexpected[1].flow.source_name == "path");
}

TEST_CASE("json reports") {
  auto r = make_report(ModelKind::Novelty, QueryFamily::Integrity, 0.1, sample());
  auto j = nlohmann::json::parse(to_json(r, "2026-03-04T05:06:07Z"));
  CHECK(j["model"] == "novelty");
  CHECK(j["query"] == "integrity");
  CHECK(j["threshold"] == 0.1);
  CHECK(j["total"] == 3);
  CHECK(j["unexpected_count"] == 2);
  REQUIRE(j["results"].size() == 2);
  CHECK(j["results"][0]["source_name"] == "name");
  CHECK(j["results"][0]["sink_type"] == "CmdInj");
  CHECK(j["results"][0]["sink_line"] == 4);
  CHECK(j["results"][0]["score"] == 0.9);

  auto empty = make_report(ModelKind::Regex, QueryFamily::Confidentiality, std::nullopt, {});
  auto e = nlohmann::json::parse(to_json(empty, "t"));
  CHECK(e["results"].empty());
  CHECK(e["threshold"].is_null());
}

TEST_CASE("sarif reports") {
  auto r = make_report(ModelKind::Novelty, QueryFamily::Integrity, 0.1, sample());
  auto s = nlohmann::json::parse(to_sarif(r));
  CHECK(s["version"] == "2.1.0");
  REQUIRE(s["runs"].size() == 1);
  const auto &run = s["runs"][0];
  CHECK(run["tool"]["driver"]["name"] == "nlflow");
  REQUIRE(run["results"].size() == 2);
  const auto &res = run["results"][0];
  CHECK(res["ruleId"] == "CmdInj");
  CHECK(res["level"] == "warning");
  CHECK(res["locations"][0]["physicalLocation"]["artifactLocation"]["uri"] == "f.js");
  CHECK(res["locations"][0]["physicalLocation"]["region"]["startLine"] == 3);
  CHECK(res["properties"]["flowId"] == r.unexpected[0].flow.id);
  std::set<std::string> rules;
  for (const auto &rule : run["tool"]["driver"]["rules"])
    rules.insert(rule["id"].get<std::string>());
  CHECK(rules.count("CmdInj") == 1);
  CHECK(rules.count("PathTrav") == 1);
}
