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

// Prediction formulas compare surprisal aggregates across conditions:
//
//   expr       := cmp | expr '&' expr | expr '|' expr | '(' expr ')'
//   cmp        := agg ('>' | '<') agg
//   agg        := ('mean' | 'sum') '(' regionlist ';' ident ')'
//   regionlist := '*' | int (',' int)*
//
// '&' binds tighter than '|'; both are left associative. Whitespace is
// insignificant between tokens.

#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace cohgym {

enum class AggFunc { kMean, kSum };
enum class CompareOp { kGreater, kLess };
enum class LogicOp { kAnd, kOr };

// A region selection: either an explicit non-empty set of region numbers or
// every region of the condition (the '*' wildcard).
class RegionSet {
 public:
  static RegionSet All() { return RegionSet(); }
  static RegionSet Of(std::set<int> regions);

  bool is_all() const { return !regions_.has_value(); }
  // Only valid when !is_all().
  const std::set<int>& regions() const { return *regions_; }
  bool contains(int region) const {
    return is_all() || regions_->count(region) > 0;
  }

  friend bool operator==(const RegionSet&, const RegionSet&) = default;

 private:
  RegionSet() = default;
  std::optional<std::set<int>> regions_;
};

struct Aggregate {
  AggFunc func = AggFunc::kMean;
  RegionSet regions = RegionSet::All();
  std::string condition;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

class PredictionExpr;
using PredictionPtr = std::shared_ptr<const PredictionExpr>;

struct Compare {
  Aggregate lhs;
  CompareOp op = CompareOp::kGreater;
  Aggregate rhs;
};

struct Logic {
  LogicOp op = LogicOp::kAnd;
  PredictionPtr lhs;
  PredictionPtr rhs;
};

// Immutable expression tree. Children are shared, so copies are cheap.
class PredictionExpr {
 public:
  using Node = std::variant<Compare, Logic>;

  explicit PredictionExpr(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }
  const Compare* as_compare() const { return std::get_if<Compare>(&node_); }
  const Logic* as_logic() const { return std::get_if<Logic>(&node_); }

  // Structural equality (deep).
  friend bool operator==(const PredictionExpr& a, const PredictionExpr& b);

 private:
  Node node_;
};

PredictionPtr MakeCompare(Aggregate lhs, CompareOp op, Aggregate rhs);
PredictionPtr MakeLogic(LogicOp op, PredictionPtr lhs, PredictionPtr rhs);

// Throws ParseError(position, expected) on malformed input.
PredictionPtr ParsePrediction(std::string_view formula);

// Canonical text: compares print bare, every And/Or node is wrapped in
// parentheses, tokens are separated by single spaces.
std::string PrintPrediction(const PredictionExpr& expr);
std::string PrintAggregate(const Aggregate& agg);

// Visits every aggregate in the tree, left to right.
template <typename Fn>
void ForEachAggregate(const PredictionExpr& expr, Fn&& fn) {
  if (const auto* cmp = expr.as_compare()) {
    fn(cmp->lhs);
    fn(cmp->rhs);
    return;
  }
  const auto* logic = expr.as_logic();
  ForEachAggregate(*logic->lhs, fn);
  ForEachAggregate(*logic->rhs, fn);
}

}  // namespace cohgym
