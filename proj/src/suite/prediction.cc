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

#include "cohgym/suite/prediction.h"

#include <cctype>
#include <limits>
#include <stdexcept>

#include "cohgym/error.h"

namespace cohgym {

RegionSet RegionSet::Of(std::set<int> regions) {
  if (regions.empty()) throw std::invalid_argument("empty region set");
  RegionSet set;
  set.regions_ = std::move(regions);
  return set;
}

bool operator==(const PredictionExpr& a, const PredictionExpr& b) {
  if (a.node_.index() != b.node_.index()) return false;
  if (const auto* ca = a.as_compare()) {
    const auto* cb = b.as_compare();
    return ca->lhs == cb->lhs && ca->op == cb->op && ca->rhs == cb->rhs;
  }
  const auto* la = a.as_logic();
  const auto* lb = b.as_logic();
  return la->op == lb->op && *la->lhs == *lb->lhs && *la->rhs == *lb->rhs;
}

PredictionPtr MakeCompare(Aggregate lhs, CompareOp op, Aggregate rhs) {
  return std::make_shared<const PredictionExpr>(
      Compare{std::move(lhs), op, std::move(rhs)});
}

PredictionPtr MakeLogic(LogicOp op, PredictionPtr lhs, PredictionPtr rhs) {
  return std::make_shared<const PredictionExpr>(
      Logic{op, std::move(lhs), std::move(rhs)});
}

namespace {

// Recursive descent over the formula bytes:
//   or_expr  := and_expr ('|' and_expr)*
//   and_expr := primary ('&' primary)*
//   primary  := '(' or_expr ')' | cmp
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PredictionPtr Parse() {
    PredictionPtr expr = ParseOr();
    SkipSpace();
    if (pos_ != text_.size()) throw ParseError(pos_, "'&', '|' or end of input");
    return expr;
  }

 private:
  PredictionPtr ParseOr() {
    PredictionPtr lhs = ParseAnd();
    while (Accept('|')) lhs = MakeLogic(LogicOp::kOr, lhs, ParseAnd());
    return lhs;
  }

  PredictionPtr ParseAnd() {
    PredictionPtr lhs = ParsePrimary();
    while (Accept('&')) lhs = MakeLogic(LogicOp::kAnd, lhs, ParsePrimary());
    return lhs;
  }

  PredictionPtr ParsePrimary() {
    if (Accept('(')) {
      PredictionPtr inner = ParseOr();
      Expect(')', "')'");
      return inner;
    }
    Aggregate lhs = ParseAggregate();
    CompareOp op;
    if (Accept('>')) {
      op = CompareOp::kGreater;
    } else if (Accept('<')) {
      op = CompareOp::kLess;
    } else {
      throw ParseError(pos_, "'>' or '<'");
    }
    Aggregate rhs = ParseAggregate();
    return MakeCompare(std::move(lhs), op, std::move(rhs));
  }

  Aggregate ParseAggregate() {
    SkipSpace();
    Aggregate agg;
    if (text_.substr(pos_, 4) == "mean") {
      agg.func = AggFunc::kMean;
      pos_ += 4;
    } else if (text_.substr(pos_, 3) == "sum") {
      agg.func = AggFunc::kSum;
      pos_ += 3;
    } else {
      throw ParseError(pos_, "'mean', 'sum' or '('");
    }
    Expect('(', "'('");
    if (Accept('*')) {
      agg.regions = RegionSet::All();
    } else {
      std::set<int> regions;
      do {
        regions.insert(ParseRegionNumber());
      } while (Accept(','));
      agg.regions = RegionSet::Of(std::move(regions));
    }
    Expect(';', "';'");
    agg.condition = ParseIdent();
    Expect(')', "')'");
    return agg;
  }

  int ParseRegionNumber() {
    SkipSpace();
    const std::size_t start = pos_;
    long long value = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw ParseError(start, "region number in int range");
      }
      ++pos_;
    }
    if (pos_ == start) throw ParseError(start, "region number or '*'");
    if (value == 0) throw ParseError(start, "positive region number");
    return static_cast<int>(value);
  }

  std::string ParseIdent() {
    SkipSpace();
    const std::size_t start = pos_;
    auto is_head = [](char c) {
      return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    auto is_tail = [&](char c) {
      return is_head(c) || std::isdigit(static_cast<unsigned char>(c)) ||
             c == '-';
    };
    if (pos_ >= text_.size() || !is_head(text_[pos_])) {
      throw ParseError(pos_, "condition name");
    }
    while (pos_ < text_.size() && is_tail(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void Expect(char c, const char* what) {
    if (!Accept(c)) throw ParseError(pos_, what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void Print(const PredictionExpr& expr, std::string& out) {
  if (const auto* cmp = expr.as_compare()) {
    out += PrintAggregate(cmp->lhs);
    out += cmp->op == CompareOp::kGreater ? " > " : " < ";
    out += PrintAggregate(cmp->rhs);
    return;
  }
  const auto* logic = expr.as_logic();
  out += '(';
  Print(*logic->lhs, out);
  out += logic->op == LogicOp::kAnd ? " & " : " | ";
  Print(*logic->rhs, out);
  out += ')';
}

}  // namespace

PredictionPtr ParsePrediction(std::string_view formula) {
  return Parser(formula).Parse();
}

std::string PrintAggregate(const Aggregate& agg) {
  std::string out = agg.func == AggFunc::kMean ? "mean(" : "sum(";
  if (agg.regions.is_all()) {
    out += '*';
  } else {
    bool first = true;
    for (int r : agg.regions.regions()) {
      if (!first) out += ',';
      out += std::to_string(r);
      first = false;
    }
  }
  out += ';';
  out += agg.condition;
  out += ')';
  return out;
}

std::string PrintPrediction(const PredictionExpr& expr) {
  std::string out;
  Print(expr, out);
  return out;
}

}  // namespace cohgym
