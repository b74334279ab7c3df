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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cohgym {

// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,  // validation, evaluation, usage
  kExitIo = 2,       // files, backend processes, wire protocol
};

inline constexpr const char* kBackendEnvVar = "COHGYM_BACKEND";

struct RunConfig {
  std::vector<std::string> suite_paths;
  std::string backend_command;
  int parallelism = 1;
  std::filesystem::path output_dir = ".";
  std::set<std::string> formats = {"json", "markdown"};
  std::chrono::milliseconds timeout{60000};
};

// Throws EvaluationError when parallelism < 1, no format is selected, a
// format is unknown, or no suite or backend is given.
void ValidateRunConfig(const RunConfig& config);

// Reads a RunConfig from JSON: {"suites": [...], "backend": "...",
// "parallelism": 1, "out": "...", "formats": [...], "timeout_seconds": 60}.
// Missing keys keep their defaults.
RunConfig ParseRunConfig(std::string_view json_text);

int CmdValidate(const std::filesystem::path& suite_path, std::ostream& out,
                std::ostream& err);

struct GenerateArgs {
  std::string kind;
  std::filesystem::path records_path;
  std::uint64_t seed = 0;
  std::filesystem::path out_path;
  std::string name;
  bool skip_invalid = false;
  std::string winograd_variant = "both";
};

inline constexpr const char* kGeneratorKinds[] = {
    "shuffle-all", "shuffle-context", "story-cloze",       "winograd",
    "coreference", "connectives",     "speaker-commitment"};

int CmdGenerate(const GenerateArgs& args, std::ostream& out, std::ostream& err);

// Writes results.json and/or report.md to config.output_dir. On a backend
// failure the finished items go to results.partial.json.
int CmdRun(const RunConfig& config, std::ostream& out, std::ostream& err);

// Renders one or more results files (one per backend) to `out`.
int CmdReport(const std::vector<std::filesystem::path>& results_paths,
              std::string_view format, std::ostream& out, std::ostream& err);

// Full command line entry point; args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace cohgym
