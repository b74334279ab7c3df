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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohgym/backend/types.h"
#include "cohgym/eval/evaluator.h"
#include "cohgym/suite/suite.h"

namespace cohgym {

inline constexpr int kResultsSchemaVersion = 1;

struct GridBreakdown {
  std::string row_key;
  std::string column_key;
  std::map<std::string, std::map<std::string, Tally>> cells;
};

struct PredictionReport {
  std::string formula;
  Tally tally;
  // tag key -> tag value -> tally
  std::map<std::string, std::map<std::string, Tally>> groups;
  std::optional<GridBreakdown> grid;
};

// CD scores of one suite under one backend.
struct SuiteReport {
  std::string suite_name;
  std::string phenomenon;
  std::size_t item_count = 0;
  std::vector<PredictionReport> predictions;
  std::vector<ItemResult> items;  // Sorted by item_number.
};

struct RunResults {
  BackendInfo backend;
  std::vector<SuiteReport> suites;
};

// Builds the per-prediction tallies, one breakdown per tag key present on any
// item, and for connective suites the sense x substitute grid.
SuiteReport BuildSuiteReport(const TestSuite& suite,
                             std::vector<ItemResult> results);

// Results document (schema_version 1). Keys are emitted in a fixed order and
// numbers in shortest round-trip form, so equal results give equal bytes.
nlohmann::ordered_json ResultsToJson(const RunResults& results);
std::string SerializeResults(const RunResults& results);

// Throws EvaluationError for documents from a newer schema version or with
// missing fields.
RunResults ParseResults(std::string_view json_text);

// Markdown tables, one row per backend: shuffling suites, story cloze and
// Winograd, coreference by genre, the connective grid (one per backend),
// speaker commitment, then any other suites. Throws EvaluationError when
// there is nothing to render.
std::string RenderMarkdown(std::span<const RunResults> runs);

}  // namespace cohgym
