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
#include <string>
#include <string_view>
#include <vector>

namespace cohgym {

// One model token. [start, end) is a byte range of the scored UTF-8 text and
// surprisal_bits is -log2 p(token | preceding tokens).
struct TokenScore {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  double surprisal_bits = 0.0;

  friend bool operator==(const TokenScore&, const TokenScore&) = default;
};

struct ScoredSequence {
  std::string request_id;
  std::vector<TokenScore> tokens;
  // False when the backend reported token texts without byte offsets; such
  // sequences are aligned with the greedy fallback.
  bool has_offsets = true;

  friend bool operator==(const ScoredSequence&, const ScoredSequence&) =
      default;
};

struct ScoreRequest {
  std::string id;
  std::string text;
};

struct BackendInfo {
  std::string backend_name;
  bool supports_separator = false;
  std::string separator_literal = "[SEP]";
  // Subword marker prefix stripped by the greedy aligner (e.g. "Ġ").
  std::string token_marker;
  // How the backend conditions the first token; informational.
  std::string first_token_context;

  friend bool operator==(const BackendInfo&, const BackendInfo&) = default;
};

inline bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Whitespace-delimited tokens with their byte offsets; surprisals are zero.
std::vector<TokenScore> SplitWhitespace(std::string_view text);

}  // namespace cohgym
