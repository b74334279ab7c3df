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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohgym/align/aligner.h"
#include "cohgym/suite/prediction.h"
#include "cohgym/suite/suite.h"

namespace cohgym {

// Pairwise (cascade) summation in input order. Bit-reproducible for a given
// sequence of values.
double PairwiseSum(std::span<const double> values);

// Surprisal totals of a region selection within one condition.
struct RegionAggregate {
  RegionSet region_set = RegionSet::All();
  std::string condition_name;
  double sum_bits = 0.0;
  std::size_t token_count = 0;
  double mean_bits = 0.0;

  double value(AggFunc func) const {
    return func == AggFunc::kMean ? mean_bits : sum_bits;
  }
};

// Sums every region in the selection (pairwise within each region, then
// pairwise across region sums in ascending region order) and divides by the
// token count. Throws EmptyAggregate when the selection holds no tokens.
RegionAggregate ComputeAggregate(const AlignedCondition& aligned,
                                 const RegionSet& regions);

enum class Verdict { kMet, kNotMet, kTie, kUndefined };

std::string_view VerdictName(Verdict v);
Verdict VerdictFromName(std::string_view name);

using AlignedItem = std::map<std::string, AlignedCondition, std::less<>>;

// Evaluates one prediction on one item.
//   - a comparison is MET when strictly true, TIE when both sides are equal,
//     NOT_MET otherwise;
//   - '&' and '|' treat only MET as true, so a TIE inside a compound formula
//     is just false and compound results are MET or NOT_MET;
//   - any empty aggregate makes the whole verdict UNDEFINED.
// Throws UnknownCondition when the formula names a condition the item lacks.
Verdict EvaluatePrediction(const AlignedItem& aligned,
                           const PredictionExpr& prediction);

struct RegionStats {
  double sum_bits = 0.0;
  std::size_t token_count = 0;
};

struct ItemResult {
  int item_number = 0;
  std::map<std::string, std::string> tags;
  std::vector<Verdict> verdicts;  // One per suite prediction.
  // condition -> region -> totals, for drill-down.
  std::map<std::string, std::map<int, RegionStats>> regions;
};

ItemResult EvaluateItem(const Item& item, const AlignedItem& aligned,
                        std::span<const Prediction> predictions);

struct Tally {
  std::size_t met = 0;
  std::size_t not_met = 0;
  std::size_t tie = 0;
  std::size_t undefined = 0;

  void Add(Verdict v);
  std::size_t total() const { return met + not_met + tie + undefined; }
  std::size_t valid() const { return met + not_met + tie; }
  // MET / (MET + NOT_MET + TIE); empty when no item is valid.
  std::optional<double> accuracy() const;

  friend bool operator==(const Tally&, const Tally&) = default;
};

Tally TallyPrediction(std::span<const ItemResult> results,
                      std::size_t prediction_index);

// Throws NoValidItems when every result is UNDEFINED (or there are none).
double CdScore(std::span<const ItemResult> results,
               std::size_t prediction_index);

inline constexpr std::string_view kUntagged = "(untagged)";

// Tally per value of `tag_key`; items without the key land in "(untagged)".
std::map<std::string, Tally> GroupReport(std::span<const ItemResult> results,
                                         std::string_view tag_key,
                                         std::size_t prediction_index);

// Two-key breakdown: row tag value -> column tag value -> tally. Items lacking
// either key are left out.
std::map<std::string, std::map<std::string, Tally>> GridReport(
    std::span<const ItemResult> results, std::string_view row_key,
    std::string_view column_key, std::size_t prediction_index);

}  // namespace cohgym
