// Copyright 2026 The CohGym Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference backend server. Speaks the NDJSON scoring protocol on
// stdin/stdout so the evaluation pipeline can run without an ML runtime.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cohgym/backend/models.h"
#include "cohgym/error.h"

namespace {

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cohgym::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference scoring backend", "cohgym-backend"};
  std::string model = "uniform";
  std::size_t vocab_size = 4;
  bool separator = false;
  std::string corpus;
  std::string fixture;
  app.add_option("--model", model, "uniform, bigram or scripted")
      ->check(CLI::IsMember({"uniform", "bigram", "scripted"}));
  app.add_option("--vocab-size", vocab_size, "Uniform vocabulary size")
      ->check(CLI::PositiveNumber);
  app.add_flag("--separator", separator,
               "Advertise speaker separator support (uniform only)");
  app.add_option("--corpus", corpus, "Training text, one line per sequence");
  app.add_option("--fixture", fixture, "Scripted fixture JSON");
  CLI11_PARSE(app, argc, argv);

  std::signal(SIGPIPE, SIG_IGN);
  std::ios::sync_with_stdio(false);
  try {
    std::unique_ptr<cohgym::ScoringModel> m;
    if (model == "uniform") {
      m = std::make_unique<cohgym::UniformModel>(vocab_size, separator);
    } else if (model == "bigram") {
      if (corpus.empty()) throw cohgym::EvaluationError("--corpus is required");
      std::vector<std::string> lines;
      std::istringstream in(Slurp(corpus));
      for (std::string line; std::getline(in, line);) lines.push_back(line);
      m = std::make_unique<cohgym::BigramModel>(
          cohgym::BigramModel::Train(lines));
    } else {
      if (fixture.empty()) {
        throw cohgym::EvaluationError("--fixture is required");
      }
      m = std::make_unique<cohgym::ScriptedModel>(
          cohgym::ScriptedModel::FromJson(Slurp(fixture)));
    }
    cohgym::Serve(*m, std::cin, std::cout);
  } catch (const cohgym::Error& e) {
    std::cerr << "cohgym-backend: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
