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

// Corpus records consumed by the generators, one JSON object per line:
//
//   story      {"sentences": [...], "distractor_ending": "..."}
//   dialogue   {"turns": [...]}
//   winograd   {"prefix", "target_referent", "distractor_referent", "suffix"}
//   coref      {"context", "continuation", "pronoun_span": [start, end],
//               "antecedent_np", "genre"}
//   connective {"pre_text", "connective", "sense", "post_text"}
//   nli        {"sentence_1", "sentence_2", "label"}
//
// Conversion from the original corpus distributions happens upstream.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cohgym/error.h"

namespace cohgym {

enum class Genre { kNarration, kDialogue };

// A story (sentences) or a dialogue (turns); the shuffle generators only see
// the ordered units.
struct UnitRecord {
  Genre genre = Genre::kNarration;
  std::vector<std::string> units;
};

struct StoryRecord {
  std::vector<std::string> sentences;
  std::optional<std::string> distractor_ending;
};

struct WinogradRecord {
  std::string prefix;
  std::string target_referent;
  std::string distractor_referent;
  std::string suffix;
};

struct CorefRecord {
  std::string context;
  std::string continuation;
  std::pair<std::size_t, std::size_t> pronoun_span;  // [start, end) bytes
  std::string antecedent_np;
  std::string genre;  // wsj | vpc | dialogue | fiction
};

struct ConnectiveRecord {
  std::string pre_text;
  std::string connective;
  std::string sense;
  std::string post_text;
};

struct NliPairRecord {
  std::string sentence_1;
  std::string sentence_2;
  std::string label;  // contradiction | entailment | neutral
};

// A record file line that is not valid JSON or misses a field.
class RecordError : public EvaluationError {
 public:
  RecordError(std::size_t line, const std::string& reason)
      : EvaluationError("line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Blank lines are ignored; line numbers in errors are 1-based.
std::vector<UnitRecord> ReadUnitRecords(std::string_view jsonl);
std::vector<StoryRecord> ReadStoryRecords(std::string_view jsonl);
std::vector<WinogradRecord> ReadWinogradRecords(std::string_view jsonl);
std::vector<CorefRecord> ReadCorefRecords(std::string_view jsonl);
std::vector<ConnectiveRecord> ReadConnectiveRecords(std::string_view jsonl);
std::vector<NliPairRecord> ReadNliPairRecords(std::string_view jsonl);

}  // namespace cohgym
