// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Classification reports. Only Unexpected flows are listed.

#pragma once

#include "nlflow/flow.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nlflow::report {

struct ClassifiedFlow {
  FlowRecord flow;
  Verdict verdict;
};

struct ClassifyReport {
  ModelKind model = ModelKind::Novelty;
  QueryFamily query = QueryFamily::Integrity;
  std::optional<double> threshold;
  std::size_t total = 0; // flows classified, reported or not
  std::vector<ClassifiedFlow> unexpected;
};

/// Keeps the Unexpected verdicts of `all`, in input order.
ClassifyReport make_report(ModelKind model, QueryFamily query, std::optional<double> threshold,
                           const std::vector<ClassifiedFlow> &all);

std::string to_json(const ClassifyReport &r, const std::string &generated_at);

/// SARIF 2.1.0 subset: one run, one rule per sink type, one result per flow.
std::string to_sarif(const ClassifyReport &r);

} // namespace nlflow::report
