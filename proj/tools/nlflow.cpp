// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return nlflow::run_cli(argc, argv, std::cout, std::cerr); }
