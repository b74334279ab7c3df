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

#include "cohgym/eval/evaluator.h"

#include "cohgym/error.h"

namespace cohgym {

double PairwiseSum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const std::size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

RegionAggregate ComputeAggregate(const AlignedCondition& aligned,
                                 const RegionSet& regions) {
  RegionAggregate agg;
  agg.region_set = regions;
  agg.condition_name = aligned.condition_name;
  std::vector<double> region_sums;
  std::vector<double> values;
  for (const auto& [region, tokens] : aligned.region_tokens) {
    if (!regions.contains(region)) continue;
    values.clear();
    for (const auto& t : tokens) values.push_back(t.surprisal_bits);
    region_sums.push_back(PairwiseSum(values));
    agg.token_count += tokens.size();
  }
  if (agg.token_count == 0) {
    std::string what = "no tokens in " +
                       PrintAggregate(Aggregate{AggFunc::kSum, regions,
                                                aligned.condition_name});
    throw EmptyAggregate(what);
  }
  agg.sum_bits = PairwiseSum(region_sums);
  agg.mean_bits = agg.sum_bits / static_cast<double>(agg.token_count);
  return agg;
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kMet: return "MET";
    case Verdict::kNotMet: return "NOT_MET";
    case Verdict::kTie: return "TIE";
    case Verdict::kUndefined: return "UNDEFINED";
  }
  return "UNDEFINED";
}

Verdict VerdictFromName(std::string_view name) {
  if (name == "MET") return Verdict::kMet;
  if (name == "NOT_MET") return Verdict::kNotMet;
  if (name == "TIE") return Verdict::kTie;
  if (name == "UNDEFINED") return Verdict::kUndefined;
  throw EvaluationError("unknown verdict '" + std::string(name) + "'");
}

namespace {

struct Undefined {};

double Value(const AlignedItem& aligned, const Aggregate& agg) {
  auto it = aligned.find(agg.condition);
  if (it == aligned.end()) throw UnknownCondition(agg.condition);
  try {
    return ComputeAggregate(it->second, agg.regions).value(agg.func);
  } catch (const EmptyAggregate&) {
    throw Undefined{};
  }
}

Verdict Evaluate(const AlignedItem& aligned, const PredictionExpr& expr) {
  if (const auto* cmp = expr.as_compare()) {
    const double lhs = Value(aligned, cmp->lhs);
    const double rhs = Value(aligned, cmp->rhs);
    if (lhs == rhs) return Verdict::kTie;
    const bool holds = cmp->op == CompareOp::kGreater ? lhs > rhs : lhs < rhs;
    return holds ? Verdict::kMet : Verdict::kNotMet;
  }
  const auto* logic = expr.as_logic();
  // Both sides are always evaluated so that an empty aggregate anywhere in
  // the formula is reported, independent of short-circuiting.
  const bool lhs = Evaluate(aligned, *logic->lhs) == Verdict::kMet;
  const bool rhs = Evaluate(aligned, *logic->rhs) == Verdict::kMet;
  const bool holds = logic->op == LogicOp::kAnd ? (lhs && rhs) : (lhs || rhs);
  return holds ? Verdict::kMet : Verdict::kNotMet;
}

}  // namespace

Verdict EvaluatePrediction(const AlignedItem& aligned,
                           const PredictionExpr& prediction) {
  ForEachAggregate(prediction, [&](const Aggregate& agg) {
    if (aligned.find(agg.condition) == aligned.end()) {
      throw UnknownCondition(agg.condition);
    }
  });
  try {
    return Evaluate(aligned, prediction);
  } catch (const Undefined&) {
    return Verdict::kUndefined;
  }
}

ItemResult EvaluateItem(const Item& item, const AlignedItem& aligned,
                        std::span<const Prediction> predictions) {
  ItemResult result;
  result.item_number = item.item_number;
  result.tags = item.tags;
  for (const auto& p : predictions) {
    result.verdicts.push_back(EvaluatePrediction(aligned, *p.expr));
  }
  for (const auto& [name, cond] : aligned) {
    auto& regions = result.regions[name];
    for (const auto& [region, tokens] : cond.region_tokens) {
      std::vector<double> values;
      for (const auto& t : tokens) values.push_back(t.surprisal_bits);
      regions[region] = RegionStats{PairwiseSum(values), tokens.size()};
    }
  }
  return result;
}

void Tally::Add(Verdict v) {
  switch (v) {
    case Verdict::kMet: ++met; break;
    case Verdict::kNotMet: ++not_met; break;
    case Verdict::kTie: ++tie; break;
    case Verdict::kUndefined: ++undefined; break;
  }
}

std::optional<double> Tally::accuracy() const {
  if (valid() == 0) return std::nullopt;
  return static_cast<double>(met) / static_cast<double>(valid());
}

Tally TallyPrediction(std::span<const ItemResult> results,
                      std::size_t prediction_index) {
  Tally tally;
  for (const auto& r : results) tally.Add(r.verdicts.at(prediction_index));
  return tally;
}

double CdScore(std::span<const ItemResult> results,
               std::size_t prediction_index) {
  const auto accuracy = TallyPrediction(results, prediction_index).accuracy();
  if (!accuracy) {
    throw NoValidItems("prediction " + std::to_string(prediction_index) +
                       " has no items with defined aggregates");
  }
  return *accuracy;
}

std::map<std::string, Tally> GroupReport(std::span<const ItemResult> results,
                                         std::string_view tag_key,
                                         std::size_t prediction_index) {
  std::map<std::string, Tally> groups;
  for (const auto& r : results) {
    auto it = r.tags.find(std::string(tag_key));
    const std::string group =
        it == r.tags.end() ? std::string(kUntagged) : it->second;
    groups[group].Add(r.verdicts.at(prediction_index));
  }
  return groups;
}

std::map<std::string, std::map<std::string, Tally>> GridReport(
    std::span<const ItemResult> results, std::string_view row_key,
    std::string_view column_key, std::size_t prediction_index) {
  std::map<std::string, std::map<std::string, Tally>> grid;
  for (const auto& r : results) {
    auto row = r.tags.find(std::string(row_key));
    auto col = r.tags.find(std::string(column_key));
    if (row == r.tags.end() || col == r.tags.end()) continue;
    grid[row->second][col->second].Add(r.verdicts.at(prediction_index));
  }
  return grid;
}

}  // namespace cohgym
