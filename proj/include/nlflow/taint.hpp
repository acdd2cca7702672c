// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Overapproximate intra-file taint analysis for JavaScript.
//
// Integrity sources are the parameters of exported functions (and the
// properties of those parameters that the body reads). Confidentiality
// sources are variable and property reads that reach a logging call.
// Sinks come from a data-driven catalog of callee patterns.

#pragma once

#include "nlflow/flow.hpp"
#include "nlflow/js_ast.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlflow::taint {

struct SinkSpec {
  SinkType sink_type = SinkType::CmdInj;
  /// Dotted callee path. A `*` segment matches any single segment.
  /// Module roots are the require()/import specifier, e.g. "child_process.exec".
  std::string callee_pattern;
  /// 0-based argument indices whose taint reaches the sink. Empty means
  /// every argument.
  std::vector<int> tainted_arg_positions;

  bool operator==(const SinkSpec &) const = default;
};

/// Built-in catalog: child-process execution, dynamic code evaluation,
/// file-system path arguments, HTTP response writes and logging calls.
const std::vector<SinkSpec> &default_sink_catalog();

std::vector<SinkSpec> parse_sink_catalog(std::string_view json_text);
std::vector<SinkSpec> load_sink_catalog(const std::string &path);
std::string serialize_sink_catalog(const std::vector<SinkSpec> &catalog);

/// True if `path` matches the dotted `pattern`.
bool callee_matches(std::string_view pattern, std::string_view path);

struct TaintConfig {
  std::vector<SinkSpec> sinks = default_sink_catalog();
  /// Callee patterns whose return value is never tainted.
  std::vector<std::string> sanitizers;
  /// Upper bound on function-body evaluations per file; beyond it calls are
  /// modelled as opaque library calls and a warning is emitted.
  std::size_t invocation_budget = 20000;
};

struct SourceDescriptor {
  SourceKind kind = SourceKind::ApiParam;
  std::string name;
  /// Absent for logged variables.
  std::optional<std::string> function_name;
  int line = 0;
  int column = 0;
  std::optional<std::string> doc_comment;
  /// Index of the exported function this source belongs to (integrity only).
  int entry = -1;

  bool operator==(const SourceDescriptor &) const = default;
};

struct Diagnostic {
  std::string file;
  int line = 0;
  int column = 0;
  std::string message;
};

/// Identifies the analyzed file inside its project.
struct FileContext {
  std::string project;
  std::string file; // relative path with '/' separators
};

/// Integrity: every parameter of every exported function plus the depth-1
/// properties of those parameters read in the body. Confidentiality: every
/// variable or property read that reaches a logging sink of the catalog.
std::vector<SourceDescriptor> find_sources(const js::Node &program, QueryFamily family,
                                           const TaintConfig &config = {},
                                           std::string_view file_stem = "module");

struct PropagationResult {
  std::vector<FlowRecord> flows;
  std::vector<Diagnostic> diagnostics;
};

/// One record (p, s) per source p and sink type s reached, with the first
/// sink line. Integrity sources that reach nothing yield (p, None).
/// Records are not length-filtered.
PropagationResult propagate(const js::Node &program, const std::vector<SourceDescriptor> &sources,
                            QueryFamily family, const TaintConfig &config,
                            const FileContext &context);

/// Parse + find_sources + propagate for one file's text.
PropagationResult analyze_source(std::string_view source, QueryFamily family,
                                 const TaintConfig &config, const FileContext &context);

struct ScanOptions {
  std::string project; // defaults to the root directory name
  std::vector<std::string> ignore_globs = {"node_modules/**", "**/node_modules/**"};
  unsigned workers = 0; // 0 = hardware concurrency
};

struct ScanResult {
  std::vector<FlowRecord> flows;
  std::vector<Diagnostic> diagnostics;
  std::size_t files_scanned = 0;
};

/// Recursively analyzes every .js/.mjs/.cjs file under `root`, applies the
/// short-name filter and returns flows sorted by (file, line). Throws Error
/// if `root` is not a readable directory.
ScanResult scan_project(const std::string &root, QueryFamily family, const TaintConfig &config,
                        const ScanOptions &options = {});

/// Glob over '/'-separated paths: `*` and `?` stay within a segment, `**`
/// matches any number of segments.
bool glob_matches(std::string_view pattern, std::string_view path);

} // namespace nlflow::taint
