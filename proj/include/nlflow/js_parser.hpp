// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "nlflow/js_ast.hpp"

#include <string_view>

namespace nlflow::js {

/// Parses one JavaScript file (script or module goal; both accepted).
/// Throws ParseError with the line/column of the first syntax error.
NodePtr parse_module(std::string_view source);

} // namespace nlflow::js
