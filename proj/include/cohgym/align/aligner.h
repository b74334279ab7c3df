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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohgym/backend/types.h"
#include "cohgym/suite/suite.h"

namespace cohgym {

struct RegionSpan {
  int region_number = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const RegionSpan&, const RegionSpan&) = default;
};

struct MaterializedCondition {
  std::string text;
  std::vector<RegionSpan> spans;
};

struct AlignedCondition {
  std::string condition_name;
  // Every region of the condition has an entry, possibly empty.
  std::map<int, std::vector<TokenScore>> region_tokens;

  std::size_t token_count() const;
  friend bool operator==(const AlignedCondition&, const AlignedCondition&) =
      default;
};

// Joins non-empty region contents with one ASCII space. An empty region gets
// a zero-width span at the offset where the next region's content begins (or
// at the end of the text when nothing follows).
MaterializedCondition Materialize(const Condition& condition);

// Assigns each token to the region containing its start offset. A token
// starting in the space between two regions belongs to the following region;
// zero-width regions never receive tokens. Throws TokenOutOfBounds when a
// token starts past the last non-empty region.
AlignedCondition Align(std::string_view condition_name,
                       std::span<const RegionSpan> spans,
                       std::span<const TokenScore> tokens);

// For backends that report token strings without offsets. Tokens are matched
// greedily against the materialized text, ignoring whitespace on both sides
// after removing `marker` from the front of each token. A token belongs to
// the region holding its first matched byte; tokens with nothing left to
// match attach to the region of the next unmatched byte. The returned tokens
// keep their original text, with start/end set to the matched byte range.
// Throws AlignmentMismatch when a token byte disagrees with the text or the
// tokens do not consume the whole text.
AlignedCondition AlignGreedyFallback(const Condition& condition,
                                     std::span<const TokenScore> tokens,
                                     std::string_view marker = {});

}  // namespace cohgym
