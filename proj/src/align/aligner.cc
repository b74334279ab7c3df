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

#include "cohgym/align/aligner.h"

#include <algorithm>

#include "cohgym/error.h"

namespace cohgym {

std::size_t AlignedCondition::token_count() const {
  std::size_t n = 0;
  for (const auto& [region, tokens] : region_tokens) n += tokens.size();
  return n;
}

MaterializedCondition Materialize(const Condition& condition) {
  MaterializedCondition out;
  std::vector<std::size_t> pending_empty;
  for (const Region& region : condition.regions) {
    if (region.content.empty()) {
      pending_empty.push_back(out.spans.size());
      out.spans.push_back(RegionSpan{region.region_number, 0, 0});
      continue;
    }
    if (!out.text.empty()) out.text += ' ';
    const std::size_t start = out.text.size();
    out.text += region.content;
    for (std::size_t idx : pending_empty) {
      out.spans[idx].start = out.spans[idx].end = start;
    }
    pending_empty.clear();
    out.spans.push_back(
        RegionSpan{region.region_number, start, out.text.size()});
  }
  for (std::size_t idx : pending_empty) {
    out.spans[idx].start = out.spans[idx].end = out.text.size();
  }
  return out;
}

AlignedCondition Align(std::string_view condition_name,
                       std::span<const RegionSpan> spans,
                       std::span<const TokenScore> tokens) {
  AlignedCondition aligned;
  aligned.condition_name = std::string(condition_name);
  for (const auto& span : spans) aligned.region_tokens[span.region_number];

  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const TokenScore& token = tokens[k];
    // First non-empty region that ends after the token start: either the
    // region containing it or the one following the gap it starts in.
    auto it = std::find_if(spans.begin(), spans.end(), [&](const RegionSpan& s) {
      return s.end > s.start && token.start < s.end;
    });
    if (it == spans.end()) throw TokenOutOfBounds(k);
    aligned.region_tokens[it->region_number].push_back(token);
  }
  return aligned;
}

AlignedCondition AlignGreedyFallback(const Condition& condition,
                                     std::span<const TokenScore> tokens,
                                     std::string_view marker) {
  const MaterializedCondition m = Materialize(condition);
  const std::string& text = m.text;
  std::size_t cursor = 0;
  auto skip_space = [&] {
    while (cursor < text.size() && IsAsciiSpace(text[cursor])) ++cursor;
  };

  std::vector<TokenScore> anchored;
  anchored.reserve(tokens.size());
  for (const TokenScore& token : tokens) {
    std::string_view body = token.text;
    if (!marker.empty() && body.substr(0, marker.size()) == marker) {
      body.remove_prefix(marker.size());
    }
    TokenScore placed = token;
    bool matched_any = false;
    for (char c : body) {
      if (IsAsciiSpace(c)) continue;
      skip_space();
      if (cursor >= text.size()) {
        throw AlignmentMismatch(cursor, "token '" + token.text +
                                            "' runs past the end of the text");
      }
      if (text[cursor] != c) {
        throw AlignmentMismatch(cursor, "token '" + token.text +
                                            "' does not match the text");
      }
      if (!matched_any) placed.start = cursor;
      matched_any = true;
      ++cursor;
      placed.end = cursor;
    }
    if (!matched_any) {
      skip_space();
      placed.start = placed.end = cursor;
    }
    anchored.push_back(std::move(placed));
  }
  skip_space();
  if (cursor != text.size()) {
    throw AlignmentMismatch(cursor, "tokens end before the text does");
  }

  AlignedCondition aligned;
  aligned.condition_name = condition.condition_name;
  for (const auto& span : m.spans) aligned.region_tokens[span.region_number];
  for (auto& token : anchored) {
    // Same start-offset rule as Align(). Empty tokens trailing the text go
    // to the last non-empty region.
    auto it = std::find_if(m.spans.begin(), m.spans.end(),
                           [&](const RegionSpan& s) {
                             return s.end > s.start && token.start < s.end;
                           });
    if (it == m.spans.end()) {
      auto last = std::find_if(m.spans.rbegin(), m.spans.rend(),
                               [](const RegionSpan& s) { return s.end > s.start; });
      if (last == m.spans.rend()) {
        throw AlignmentMismatch(0, "condition text is empty");
      }
      aligned.region_tokens[last->region_number].push_back(std::move(token));
    } else {
      aligned.region_tokens[it->region_number].push_back(std::move(token));
    }
  }
  return aligned;
}

}  // namespace cohgym
