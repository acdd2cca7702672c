// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlflow {

/// Exit codes: 0 ran cleanly, 1 unexpected flows reported, 2 usage or
/// configuration error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace nlflow
