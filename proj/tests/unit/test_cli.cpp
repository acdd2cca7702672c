// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/cli.hpp"

#include <sstream>

using namespace nlflow;
using test::make_flow;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string toy_pair_flows() {
  FlowRecord name = make_flow("name", SinkType::CmdInj, std::string("locale"), std::nullopt, 3);
  FlowRecord command =
      make_flow("command", SinkType::CmdInj, std::string("execaCommand"), std::nullopt, 10);
  return serialize_flows({name, command});
}

std::string mixed_flows() {
  return serialize_flows(
      {make_flow("name", SinkType::CmdInj, std::string("locale"), std::nullopt, 3),
       make_flow("command", SinkType::CmdInj, std::string("execaCommand"), std::nullopt, 10),
       make_flow("file", SinkType::PathTrav, std::string("read"), std::nullopt, 20),
       make_flow("count", SinkType::None, std::string("size"), std::nullopt, 30)});
}

} // namespace

TEST_CASE("scan of an empty directory writes an empty file") {
  test::TempDir dir("cli_empty");
  std::filesystem::create_directories(dir.path / "proj");
  auto r = cli({"scan", dir / "proj", "--out", dir / "flows.jsonl"});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "flows.jsonl"));
  CHECK(read_file(dir / "flows.jsonl").empty());
}

TEST_CASE("scan of a missing directory fails with a message") {
  test::TempDir dir("cli_missing");
  auto r = cli({"scan", dir / "absent"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("scan of the micro-corpus equals its annotations") {
  test::TempDir dir("cli_scan");
  std::string sanitizers;
  for (const auto &s : test::corpus_sanitizers())
    sanitizers += (sanitizers.empty() ? "" : ",") + s;
  auto r = cli({"scan", test::kCorpusDir + "/integrity", "--project", "corpus", "--sanitizers",
                sanitizers, "--out", dir / "flows.jsonl"});
  REQUIRE(r.code == 0);
  std::set<test::FlowKey> got;
  for (const auto &f : load_flows(dir / "flows.jsonl"))
    got.insert(test::key_of(f));
  CHECK(got == test::expected_flows(test::kCorpusDir + "/integrity"));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"train", "--model", "nonsense", "--out", "x"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("novelty training writes one file per sink type") {
  test::TempDir dir("cli_novelty");
  auto r = cli({"train", "--model", "novelty", "--out", dir / "model"});
  REQUIRE(r.code == 0);
  for (const char *s : {"CmdInj", "CodeInj", "XSS", "PathTrav", "Logging"})
    CHECK(std::filesystem::exists(dir.path / "model" / ("ocsvm_" + std::string(s) + ".json")));
}

TEST_CASE("toy pair classification") {
  test::TempDir dir("cli_toy");
  write_file(dir / "flows.jsonl", toy_pair_flows());
  REQUIRE(cli({"train", "--model", "novelty", "--out", dir / "model"}).code == 0);
  auto r = cli({"classify", "--model", dir / "model", "--flows", dir / "flows.jsonl",
                "--threshold", "0.1", "--out", dir / "report.json"});
  CHECK(r.code == 1);
  auto j = nlohmann::json::parse(read_file(dir / "report.json"));
  REQUIRE(j["results"].size() == 1);
  CHECK(j["results"][0]["source_name"] == "name");
  CHECK(j["results"][0]["function_name"] == "locale");

  auto sarif = cli({"classify", "--model", dir / "model", "--flows", dir / "flows.jsonl",
                    "--threshold", "0.1", "--format", "sarif"});
  CHECK(sarif.code == 1);
  CHECK(nlohmann::json::parse(sarif.out)["runs"][0]["results"].size() == 1);
}

TEST_CASE("classifying no flows gives an empty report") {
  test::TempDir dir("cli_none");
  write_file(dir / "flows.jsonl", "");
  REQUIRE(cli({"train", "--model", "novelty", "--out", dir / "model"}).code == 0);
  auto r = cli({"classify", "--model", dir / "model", "--flows", dir / "flows.jsonl",
                "--threshold", "0.1"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["results"].empty());
  CHECK(j["total"] == 0);
}

TEST_CASE("thresholded models need a threshold") {
  test::TempDir dir("cli_thr");
  write_file(dir / "corpus.jsonl", mixed_flows());
  write_file(dir / "flows.jsonl", toy_pair_flows());
  REQUIRE(cli({"train", "--model", "sink", "--flows", dir / "corpus.jsonl", "--hidden", "4",
               "--epochs", "5", "--out", dir / "sink.json"})
              .code == 0);
  CHECK(std::filesystem::exists(dir / "sink.json.log.csv"));
  auto r = cli({"classify", "--model", dir / "sink.json", "--flows", dir / "flows.jsonl"});
  CHECK(r.code == 2);
  CHECK(r.err.find("threshold") != std::string::npos);
  CHECK(cli({"classify", "--model", dir / "sink.json", "--flows", dir / "flows.jsonl",
             "--threshold", "0.5"})
            .code != 2);
}

TEST_CASE("sink-prediction training is reproducible") {
  test::TempDir dir("cli_repro");
  write_file(dir / "flows.jsonl", mixed_flows());
  for (const char *out : {"a.json", "b.json"})
    REQUIRE(cli({"train", "--model", "sink", "--flows", dir / "flows.jsonl", "--hidden", "4",
                 "--epochs", "20", "--seed", "3", "--out", dir / out})
                .code == 0);
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));
}

TEST_CASE("binary training needs labels") {
  test::TempDir dir("cli_binary");
  write_file(dir / "flows.jsonl", toy_pair_flows());
  auto r = cli({"train", "--model", "binary", "--flows", dir / "flows.jsonl", "--out",
                dir / "bin"});
  CHECK(r.code == 2);
}

TEST_CASE("eval rejects a mismatched protocol") {
  test::TempDir dir("cli_eval");
  auto flows = parse_flows(toy_pair_flows());
  write_file(dir / "flows.jsonl", serialize_flows(flows));
  write_file(dir / "labels.jsonl", serialize_labels({{flows[0], Label::Unexpected},
                                                     {flows[1], Label::Expected}}));
  auto bad = cli({"eval", "--model", "novelty", "--protocol", "kfold", "--flows",
                  dir / "flows.jsonl", "--labels", dir / "labels.jsonl"});
  CHECK(bad.code == 2);
  auto ok = cli({"eval", "--model", "novelty", "--flows", dir / "flows.jsonl", "--labels",
                 dir / "labels.jsonl", "--out", dir / "report.json", "--csv", dir / "pr.csv"});
  REQUIRE(ok.code == 0);
  auto j = nlohmann::json::parse(read_file(dir / "report.json"));
  CHECK(j["protocol"] == "sweep");
  CHECK(j["f1"] == 1.0);
  CHECK(read_file(dir / "pr.csv").rfind("threshold,precision,recall,f1\n", 0) == 0);
}

TEST_CASE("sweep over a stored model") {
  test::TempDir dir("cli_sweep");
  auto flows = parse_flows(toy_pair_flows());
  write_file(dir / "flows.jsonl", serialize_flows(flows));
  write_file(dir / "labels.jsonl", serialize_labels({{flows[0], Label::Unexpected},
                                                     {flows[1], Label::Expected}}));
  REQUIRE(cli({"train", "--model", "novelty", "--out", dir / "model"}).code == 0);
  auto r = cli({"sweep", "--model", dir / "model", "--flows", dir / "flows.jsonl", "--labels",
                dir / "labels.jsonl"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["f1"] == 1.0);
  CHECK(j["pr_points"].size() == 3);
}
