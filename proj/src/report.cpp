// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/report.hpp"

#include <json.hpp>

#include <set>

namespace nlflow::report {

using nlohmann::ordered_json;

ClassifyReport make_report(ModelKind model, QueryFamily query, std::optional<double> threshold,
                           const std::vector<ClassifiedFlow> &all) {
  ClassifyReport r;
  r.model = model;
  r.query = query;
  r.threshold = threshold;
  r.total = all.size();
  for (const auto &c : all)
    if (c.verdict.decision == Label::Unexpected)
      r.unexpected.push_back(c);
  return r;
}

namespace {

std::string describe(const FlowRecord &f) {
  std::string where = f.function_name ? " of " + *f.function_name : std::string();
  if (f.sink_type == SinkType::Logging)
    return "'" + f.source_name + "' is logged (possibly sensitive data)";
  return "parameter '" + f.source_name + "'" + where + " flows into a " +
         std::string(to_string(f.sink_type)) + " sink without a naming or documentation cue";
}

} // namespace

std::string to_json(const ClassifyReport &r, const std::string &generated_at) {
  ordered_json j;
  j["generated_at"] = generated_at;
  j["model"] = to_string(r.model);
  j["query"] = to_string(r.query);
  j["threshold"] = r.threshold ? ordered_json(*r.threshold) : ordered_json();
  j["total"] = r.total;
  j["unexpected_count"] = r.unexpected.size();
  ordered_json results = ordered_json::array();
  for (const auto &c : r.unexpected) {
    const FlowRecord &f = c.flow;
    ordered_json e;
    e["id"] = f.id;
    e["project"] = f.project;
    e["file"] = f.file;
    e["line"] = f.line;
    e["source_kind"] = to_string(f.source_kind);
    e["source_name"] = f.source_name;
    e["function_name"] = f.function_name ? ordered_json(*f.function_name) : ordered_json();
    e["sink_type"] = to_string(f.sink_type);
    e["sink_line"] = f.sink_line ? ordered_json(*f.sink_line) : ordered_json();
    e["score"] = c.verdict.score;
    if (c.verdict.raw_count)
      e["raw_count"] = *c.verdict.raw_count;
    results.push_back(std::move(e));
  }
  j["results"] = results;
  return j.dump(2) + "\n";
}

std::string to_sarif(const ClassifyReport &r) {
  std::set<SinkType> sinks;
  for (const auto &c : r.unexpected)
    sinks.insert(c.flow.sink_type);
  ordered_json rules = ordered_json::array();
  for (SinkType t : sinks) {
    ordered_json rule;
    rule["id"] = to_string(t);
    rule["shortDescription"] = {{"text", "Unexpected flow into a " + std::string(to_string(t)) + " sink"}};
    rules.push_back(std::move(rule));
  }
  ordered_json results = ordered_json::array();
  for (const auto &c : r.unexpected) {
    const FlowRecord &f = c.flow;
    ordered_json loc;
    loc["physicalLocation"]["artifactLocation"]["uri"] = f.file;
    loc["physicalLocation"]["region"]["startLine"] = f.line;
    ordered_json res;
    res["ruleId"] = to_string(f.sink_type);
    res["level"] = "warning";
    res["message"] = {{"text", describe(f)}};
    res["locations"] = ordered_json::array({loc});
    if (f.sink_line) {
      ordered_json sink_loc;
      sink_loc["physicalLocation"]["artifactLocation"]["uri"] = f.file;
      sink_loc["physicalLocation"]["region"]["startLine"] = *f.sink_line;
      sink_loc["message"] = {{"text", "sink"}};
      res["relatedLocations"] = ordered_json::array({sink_loc});
    }
    res["properties"] = {{"flowId", f.id}, {"score", c.verdict.score}, {"model", to_string(r.model)}};
    results.push_back(std::move(res));
  }
  ordered_json run;
  run["tool"]["driver"]["name"] = "nlflow";
  run["tool"]["driver"]["rules"] = rules;
  run["results"] = results;
  ordered_json doc;
  doc["$schema"] = "https://json.schemastore.org/sarif-2.1.0.json";
  doc["version"] = "2.1.0";
  doc["runs"] = ordered_json::array({run});
  return doc.dump(2) + "\n";
}

} // namespace nlflow::report
