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

#include "cohgym/cli/commands.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "cohgym/cli/runner.h"
#include "cohgym/error.h"
#include "cohgym/gen/generators.h"

namespace cohgym {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void WriteFile(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("error writing " + path.string());
}

// Maps library exceptions onto exit codes, printing the message.
template <typename Fn>
int Guard(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace

void ValidateRunConfig(const RunConfig& config) {
  if (config.parallelism < 1) {
    throw EvaluationError("parallelism must be at least 1");
  }
  if (config.formats.empty()) {
    throw EvaluationError("select at least one report format");
  }
  for (const auto& f : config.formats) {
    if (f != "json" && f != "markdown") {
      throw EvaluationError("unknown report format '" + f + "'");
    }
  }
  if (config.suite_paths.empty()) throw EvaluationError("no suite given");
  if (config.backend_command.empty()) {
    throw EvaluationError(std::string("no backend command given (use --backend "
                                      "or set ") +
                          kBackendEnvVar + ")");
  }
  if (config.timeout.count() <= 0) {
    throw EvaluationError("timeout must be positive");
  }
}

RunConfig ParseRunConfig(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw MalformedJson(std::string("run config: ") + e.what());
  }
  RunConfig config;
  try {
    if (j.contains("suites")) {
      config.suite_paths = j.at("suites").get<std::vector<std::string>>();
    }
    config.backend_command = j.value("backend", "");
    config.parallelism = j.value("parallelism", 1);
    config.output_dir = j.value("out", std::string("."));
    if (j.contains("formats")) {
      const auto formats = j.at("formats").get<std::vector<std::string>>();
      config.formats = {formats.begin(), formats.end()};
    }
    if (j.contains("timeout_seconds")) {
      config.timeout = std::chrono::milliseconds(
          static_cast<long long>(j.at("timeout_seconds").get<double>() * 1000));
    }
  } catch (const json::exception& e) {
    throw SchemaViolation("run config", e.what());
  }
  return config;
}

int CmdValidate(const fs::path& suite_path, std::ostream& out,
                std::ostream& err) {
  return Guard(err, [&] {
    const TestSuite suite = ParseSuite(ReadFile(suite_path));
    std::size_t min_regions = SIZE_MAX;
    std::size_t max_regions = 0;
    for (const auto& item : suite.items) {
      const std::size_t r = item.conditions.front().regions.size();
      min_regions = std::min(min_regions, r);
      max_regions = std::max(max_regions, r);
    }
    out << "items=" << suite.items.size()
        << " conditions=" << suite.items.front().conditions.size()
        << " regions=" << min_regions;
    if (max_regions != min_regions) out << "-" << max_regions;
    out << " predictions=" << suite.predictions.size() << '\n';
    return kExitOk;
  });
}

int CmdGenerate(const GenerateArgs& args, std::ostream& out,
                std::ostream& err) {
  return Guard(err, [&] {
    const std::string text = ReadFile(args.records_path);
    GeneratorOptions options;
    options.name = args.name;
    options.skip_invalid = args.skip_invalid;

    GenerateResult result;
    if (args.kind == "shuffle-all") {
      result = GenShuffleAll(ReadUnitRecords(text), args.seed, options);
    } else if (args.kind == "shuffle-context") {
      result = GenShuffleContext(ReadUnitRecords(text), args.seed, options);
    } else if (args.kind == "story-cloze") {
      result = GenStoryCloze(ReadStoryRecords(text), options);
    } else if (args.kind == "winograd") {
      WinogradVariant variant;
      if (args.winograd_variant == "full") {
        variant = WinogradVariant::kFull;
      } else if (args.winograd_variant == "partial") {
        variant = WinogradVariant::kPartial;
      } else if (args.winograd_variant == "both") {
        variant = WinogradVariant::kBoth;
      } else {
        throw EvaluationError("unknown winograd variant '" +
                              args.winograd_variant + "'");
      }
      result = GenWinograd(ReadWinogradRecords(text), variant, options);
    } else if (args.kind == "coreference") {
      result = GenCoreference(ReadCorefRecords(text), options);
    } else if (args.kind == "connectives") {
      result = GenConnectives(ReadConnectiveRecords(text), options);
    } else if (args.kind == "speaker-commitment") {
      result = GenSpeakerCommitment(ReadNliPairRecords(text), options);
    } else {
      throw EvaluationError("unknown generator kind '" + args.kind + "'");
    }

    WriteFile(args.out_path, SerializeSuite(result.suite));
    for (const auto& s : result.skipped) {
      err << "skipped record " << s.record_index << ": " << s.reason << '\n';
    }
    out << "emitted=" << result.suite.items.size()
        << " skipped=" << result.skipped.size() << '\n';
    return kExitOk;
  });
}

int CmdRun(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    ValidateRunConfig(config);
    std::vector<TestSuite> suites;
    for (const auto& path : config.suite_paths) {
      try {
        suites.push_back(ParseSuite(ReadFile(path)));
      } catch (const EvaluationError& e) {
        throw EvaluationError(path + ": " + e.what());
      }
    }
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
      throw IoError("cannot create " + config.output_dir.string() + ": " +
                    ec.message());
    }

    const BackendFactory factory = [&config] {
      return std::make_unique<SubprocessBackend>(config.backend_command,
                                                 config.timeout);
    };
    RunOutcome outcome = RunSuites(suites, factory, config.parallelism);
    if (outcome.error) {
      const fs::path partial = config.output_dir / "results.partial.json";
      WriteFile(partial, SerializeResults(outcome.results));
      err << "partial results written to " << partial.string() << '\n';
      std::rethrow_exception(outcome.error);
    }

    if (config.formats.count("json")) {
      const fs::path path = config.output_dir / "results.json";
      WriteFile(path, SerializeResults(outcome.results));
      out << "wrote " << path.string() << '\n';
    }
    if (config.formats.count("markdown")) {
      const fs::path path = config.output_dir / "report.md";
      const RunResults runs[] = {outcome.results};
      WriteFile(path, RenderMarkdown(runs));
      out << "wrote " << path.string() << '\n';
    }
    for (const auto& s : outcome.results.suites) {
      for (const auto& p : s.predictions) {
        const auto acc = p.tally.accuracy();
        out << s.suite_name << "  " << p.formula << "  accuracy="
            << (acc ? std::to_string(*acc) : std::string("n/a"))
            << " items=" << p.tally.total() << " ties=" << p.tally.tie
            << " undefined=" << p.tally.undefined << '\n';
      }
    }
    return kExitOk;
  });
}

int CmdReport(const std::vector<fs::path>& results_paths,
              std::string_view format, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] {
    if (results_paths.empty()) throw EvaluationError("no results files given");
    std::vector<RunResults> runs;
    for (const auto& path : results_paths) {
      runs.push_back(ParseResults(ReadFile(path)));
    }
    if (format == "markdown") {
      out << RenderMarkdown(runs);
    } else if (format == "json") {
      bool any = false;
      for (const auto& r : runs) any = any || !r.suites.empty();
      if (!any) throw EvaluationError("no results to render");
      nlohmann::ordered_json all = nlohmann::ordered_json::array();
      for (const auto& r : runs) all.push_back(ResultsToJson(r));
      out << all.dump(2) << '\n';
    } else {
      throw EvaluationError("unknown report format '" + std::string(format) +
                            "'");
    }
    return kExitOk;
  });
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Targeted coherence evaluation of language models", "cohgym"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a suite file");
  validate->add_option("suite", validate_path, "Suite JSON")->required();

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build a suite from records");
  generate->add_option("kind", gen.kind, "Generator kind")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(
          std::begin(kGeneratorKinds), std::end(kGeneratorKinds))));
  generate->add_option("--records", gen.records_path, "JSON-lines records")
      ->required();
  generate->add_option("--out", gen.out_path, "Output suite path")->required();
  generate->add_option("--seed", gen.seed, "Shuffle seed");
  generate->add_option("--name", gen.name, "Suite name");
  generate->add_flag("--skip-invalid", gen.skip_invalid,
                     "Skip invalid records instead of failing");
  generate->add_option("--variant", gen.winograd_variant,
                       "Winograd predictions: full, partial or both");

  RunConfig run_config;
  std::string config_path;
  std::vector<std::string> suite_paths;
  std::string backend;
  std::optional<int> parallelism;
  std::optional<std::string> out_dir;
  std::vector<std::string> formats;
  std::optional<double> timeout_seconds;
  auto* run = app.add_subcommand("run", "Score suites with a backend");
  run->add_option("--config", config_path, "JSON run configuration");
  run->add_option("--suite", suite_paths, "Suite JSON (repeatable)");
  run->add_option("--backend", backend, "Backend command line");
  run->add_option("--parallelism", parallelism, "Backend processes");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--format", formats, "json and/or markdown (repeatable)");
  run->add_option("--timeout", timeout_seconds, "Seconds per request");

  std::vector<std::string> report_paths;
  std::string report_format = "markdown";
  auto* report = app.add_subcommand("report", "Render results as tables");
  report->add_option("results", report_paths, "Results JSON files")
      ->required();
  report->add_option("--format", report_format, "markdown or json");

  std::vector<const char*> argv = {"cohgym"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (*validate) return CmdValidate(validate_path, out, err);
  if (*generate) return CmdGenerate(gen, out, err);
  if (*report) {
    std::vector<fs::path> paths(report_paths.begin(), report_paths.end());
    return CmdReport(paths, report_format, out, err);
  }

  return Guard(err, [&] {
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw IoError("cannot read " + config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      run_config = ParseRunConfig(ss.str());
    }
    if (!suite_paths.empty()) run_config.suite_paths = suite_paths;
    if (!backend.empty()) run_config.backend_command = backend;
    if (run_config.backend_command.empty()) {
      if (const char* env = std::getenv(kBackendEnvVar)) {
        run_config.backend_command = env;
      }
    }
    if (parallelism) run_config.parallelism = *parallelism;
    if (out_dir) run_config.output_dir = *out_dir;
    if (!formats.empty()) run_config.formats = {formats.begin(), formats.end()};
    if (timeout_seconds) {
      run_config.timeout = std::chrono::milliseconds(
          static_cast<long long>(*timeout_seconds * 1000));
    }
    return CmdRun(run_config, out, err);
  });
}

}  // namespace cohgym
