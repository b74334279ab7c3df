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
#include <string>
#include <string_view>
#include <vector>

#include "cohgym/suite/prediction.h"

namespace cohgym {

struct Region {
  int region_number = 0;
  std::string content;

  friend bool operator==(const Region&, const Region&) = default;
};

struct Condition {
  std::string condition_name;
  std::vector<Region> regions;

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Item {
  int item_number = 0;
  std::map<std::string, std::string> tags;
  std::vector<Condition> conditions;

  const Condition* find_condition(std::string_view name) const;

  friend bool operator==(const Item&, const Item&) = default;
};

// A suite-level prediction keeps its source text alongside the parsed tree.
// Equality is structural; serialization writes the canonical printed form.
struct Prediction {
  std::string formula;
  PredictionPtr expr;

  static Prediction FromFormula(std::string formula) {
    PredictionPtr expr = ParsePrediction(formula);
    return Prediction{std::move(formula), std::move(expr)};
  }

  friend bool operator==(const Prediction& a, const Prediction& b) {
    return *a.expr == *b.expr;
  }
};

struct TestSuite {
  std::string name;
  std::string phenomenon;
  std::map<int, std::string> region_meta;
  std::vector<Prediction> predictions;
  std::vector<Item> items;

  friend bool operator==(const TestSuite&, const TestSuite&) = default;
};

inline constexpr std::string_view kPhenomena[] = {
    "shuffle_all", "shuffle_context",  "story_cloze",
    "winograd_full", "winograd_partial", "coreference",
    "connectives", "speaker_commitment", "custom"};

bool IsKnownPhenomenon(std::string_view phenomenon);

// Suites whose conditions carry a speaker separator literal.
bool RequiresSeparator(const TestSuite& suite);

// Checks every structural invariant. Throws SchemaViolation or
// InconsistentConditions naming the first problem found.
//
// Items may differ from each other in region count (dialogue shuffles have a
// region per turn), but within an item every condition has regions 1..R, and
// every region number a prediction names must exist in every item.
void ValidateSuite(const TestSuite& suite);

// Parses and validates suite JSON. Throws MalformedJson, SchemaViolation or
// InconsistentConditions.
TestSuite ParseSuite(std::string_view utf8_json);

// Canonical JSON: keys in schema order, region_meta and tags sorted by key,
// items sorted by item_number, two-space indent, trailing newline.
std::string SerializeSuite(const TestSuite& suite);

}  // namespace cohgym
