// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "support.hpp"

#include "nlflow/js_parser.hpp"
#include "nlflow/taint.hpp"

#include <algorithm>
#include <filesystem>

using namespace nlflow;
using namespace nlflow::taint;

namespace {

TaintConfig toy_config() {
  TaintConfig c;
  c.sinks = {{SinkType::CmdInj, "execLike", {}},
             {SinkType::CodeInj, "evalLike", {0}},
             {SinkType::Logging, "console.log", {}}};
  c.sanitizers = {"clean"};
  return c;
}

std::vector<FlowRecord> flows_of(const std::string &src, QueryFamily family = QueryFamily::Integrity,
                                 const TaintConfig &cfg = toy_config()) {
  return analyze_source(src, family, cfg, {"p", "a.js"}).flows;
}

bool has_flow(const std::vector<FlowRecord> &flows, const std::string &name, SinkType sink) {
  return std::any_of(flows.begin(), flows.end(), [&](const FlowRecord &f) {
    return f.source_name == name && f.sink_type == sink;
  });
}

} // namespace

TEST_CASE("callee patterns") {
  CHECK(callee_matches("child_process.exec", "child_process.exec"));
  CHECK(callee_matches("*.send", "res.send"));
  CHECK_FALSE(callee_matches("*.send", "send"));
  CHECK_FALSE(callee_matches("child_process.exec", "child_process.execSync"));
}

TEST_CASE("sink catalog round-trips and the data file equals the defaults") {
  const auto &cat = default_sink_catalog();
  CHECK(parse_sink_catalog(serialize_sink_catalog(cat)) == cat);
  CHECK(load_sink_catalog(test::kDataDir + "/sinks.json") == cat);
  for (const auto &s : cat)
    CHECK(s.sink_type != SinkType::None);
}

TEST_CASE("exported function parameters are sources") {
  auto prog = js::parse_module("exports.run = function(cmd){ execLike(cmd) }");
  auto srcs = find_sources(*prog, QueryFamily::Integrity, toy_config());
  REQUIRE(srcs.size() == 1);
  CHECK(srcs[0].name == "cmd");
  CHECK(srcs[0].kind == SourceKind::ApiParam);
  CHECK(srcs[0].function_name == std::optional<std::string>("run"));
}

TEST_CASE("read properties of parameters are additional sources") {
  auto prog = js::parse_module("exports.run = function(opts){ use(opts.path) }");
  auto srcs = find_sources(*prog, QueryFamily::Integrity, toy_config());
  REQUIRE(srcs.size() == 2);
  CHECK(srcs[1].name == "path");
  CHECK(srcs[1].kind == SourceKind::ParamProperty);
}

TEST_CASE("files without exports have no integrity sources") {
  auto prog = js::parse_module("function helper(a){ execLike(a) }");
  CHECK(find_sources(*prog, QueryFamily::Integrity, toy_config()).empty());
}

TEST_CASE("direct flow into a registered sink") {
  auto flows = flows_of("exports.locale = function(name){ execLike(name) }");
  REQUIRE(flows.size() == 1);
  CHECK(flows[0].source_name == "name");
  CHECK(flows[0].sink_type == SinkType::CmdInj);
  CHECK(flows[0].function_name == std::optional<std::string>("locale"));
  CHECK(flows[0].sink_line == std::optional<std::int64_t>(1));
  CHECK(flows[0].id == compute_flow_id(flows[0]));
}

TEST_CASE("flow through string concatenation") {
  auto flows = flows_of("exports.f = function(a){ const b = \"x\" + a; evalLike(b) }");
  CHECK(has_flow(flows, "a", SinkType::CodeInj));
}

TEST_CASE("a source reaching nothing yields a None record") {
  auto flows = flows_of("exports.g = function(a){ return a }");
  REQUIRE(flows.size() == 1);
  CHECK(flows[0].sink_type == SinkType::None);
  CHECK_FALSE(flows[0].sink_line.has_value());
}

TEST_CASE("argument positions restrict the sink") {
  auto flows = flows_of("exports.f = function(code, ctx){ evalLike(code, ctx) }");
  CHECK(has_flow(flows, "code", SinkType::CodeInj));
  CHECK_FALSE(has_flow(flows, "ctx", SinkType::CodeInj));
}

TEST_CASE("sanitizer results are clean") {
  auto flows = flows_of("exports.f = function(cmd){ execLike(clean(cmd)) }");
  CHECK_FALSE(has_flow(flows, "cmd", SinkType::CmdInj));
}

TEST_CASE("intra-file calls bind arguments and returns") {
  const char *src = R"(
function wrap(x) { return 'run ' + x; }
function go(y) { execLike(y); }
exports.f = function(arg) { go(wrap(arg)); };
)";
  CHECK(has_flow(flows_of(src), "arg", SinkType::CmdInj));
}

TEST_CASE("containers carry element taint") {
  const char *src = R"(
exports.f = function(arg) {
  const parts = ['a', { v: arg }];
  execLike(parts);
};
)";
  CHECK(has_flow(flows_of(src), "arg", SinkType::CmdInj));
}

TEST_CASE("template literals propagate") {
  CHECK(has_flow(flows_of("exports.f = (arg) => execLike(`run ${arg}`)"), "arg", SinkType::CmdInj));
}

TEST_CASE("straight-line reassignment replaces the value") {
  const char *killed = R"(
exports.f = function(bin) {
  bin = 'node';
  execLike(bin);
};
)";
  CHECK_FALSE(has_flow(flows_of(killed), "bin", SinkType::CmdInj));

  const char *branchy = R"(
exports.f = function(bin, fast) {
  if (fast) bin = 'node';
  execLike(bin);
};
)";
  CHECK(has_flow(flows_of(branchy), "bin", SinkType::CmdInj));
}

TEST_CASE("loops reach a fixpoint") {
  const char *src = R"(
exports.f = function(arg) {
  let a = '', b = '', c = '';
  for (let i = 0; i < 3; i++) { c = b; b = a; a = arg; }
  execLike(c);
};
)";
  CHECK(has_flow(flows_of(src), "arg", SinkType::CmdInj));
}

TEST_CASE("module-style exports") {
  CHECK(has_flow(flows_of("export function f(arg) { execLike(arg) }"), "arg", SinkType::CmdInj));
  CHECK(has_flow(flows_of("module.exports = function (arg) { execLike(arg) }"), "arg",
                 SinkType::CmdInj));
  CHECK(has_flow(flows_of("const api = {}; api.ping = function (arg) { execLike(arg) };\n"
                          "module.exports = api;"),
                 "arg", SinkType::CmdInj));
}

TEST_CASE("logged variables are confidentiality sources") {
  auto flows = flows_of("function f(){ const password = read(); console.log(password); }",
                        QueryFamily::Confidentiality);
  REQUIRE(has_flow(flows, "password", SinkType::Logging));
  for (const auto &f : flows)
    CHECK(f.source_kind == SourceKind::LoggedVar);
}

TEST_CASE("scanning a directory") {
  test::TempDir dir("scan");
  write_file(dir / "b.js", "exports.f = function(cmd){ execLike(cmd) }\n");
  write_file(dir / "a.js", "exports.g = function(arg){ execLike(arg) }\n");
  write_file(dir / "c.js", "exports.h = function(p){ execLike(p) }\n");
  std::filesystem::create_directories(dir.path / "node_modules");
  write_file(dir / "node_modules/dep.js", "exports.f = function(zz){ execLike(zz) }\n");
  ScanOptions opt;
  opt.project = "p";
  auto result = scan_project(dir.path.string(), QueryFamily::Integrity, toy_config(), opt);
  REQUIRE(result.flows.size() == 2);
  CHECK(result.flows[0].file == "a.js");
  CHECK(result.flows[1].file == "b.js");
  CHECK(result.files_scanned == 3);
}

TEST_CASE("scanning an empty directory gives nothing; a missing one throws") {
  test::TempDir dir("empty");
  auto result = scan_project(dir.path.string(), QueryFamily::Integrity, toy_config(), {});
  CHECK(result.flows.empty());
  CHECK_THROWS_AS(scan_project((dir.path / "absent").string(), QueryFamily::Integrity,
                               toy_config(), {}),
                  Error);
}

TEST_CASE("a syntax error becomes a diagnostic") {
  test::TempDir dir("diag");
  write_file(dir / "bad.js", "function (\n");
  write_file(dir / "ok.js", "exports.g = function(arg){ execLike(arg) }\n");
  auto result = scan_project(dir.path.string(), QueryFamily::Integrity, toy_config(), {});
  CHECK(result.flows.size() == 1);
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].file == "bad.js");
}

TEST_CASE("scan results do not depend on the worker count") {
  ScanOptions one, many;
  one.workers = 1;
  many.workers = 8;
  one.project = many.project = "corpus";
  TaintConfig cfg;
  cfg.sanitizers = test::corpus_sanitizers();
  auto dir = test::kCorpusDir + "/integrity";
  auto a = scan_project(dir, QueryFamily::Integrity, cfg, one);
  auto b = scan_project(dir, QueryFamily::Integrity, cfg, many);
  CHECK(serialize_flows(a.flows) == serialize_flows(b.flows));
}
