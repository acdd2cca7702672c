// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serves scripted completions from a fixture file until killed.

#include "nlflow/common.hpp"
#include "nlflow/llm.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app("Scripted completion service for tests and demos", "mock_completion_server");
  std::string fixture, host = "127.0.0.1";
  int port = 8089;
  app.add_option("--fixture", fixture, "fixture JSON")->required();
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "port");
  CLI11_PARSE(app, argc, argv);
  try {
    nlflow::llm::MockCompletionServer server(nlflow::read_file(fixture));
    std::cerr << "listening on http://" << host << ':' << port << "/v1/completions\n";
    server.listen_blocking(host, port);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
