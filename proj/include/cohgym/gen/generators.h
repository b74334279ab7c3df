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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohgym/gen/records.h"
#include "cohgym/suite/suite.h"

namespace cohgym {

enum class GeneratorErrorKind {
  kTooFewUnits,
  kMissingDistractor,
  kSpanNotPronoun,
  kUnknownConnective,
  kNonContradictionLabel,
  kInvalidRecord,
  kNoItems,
};

std::string_view GeneratorErrorName(GeneratorErrorKind kind);

class GeneratorError : public EvaluationError {
 public:
  GeneratorError(GeneratorErrorKind kind, std::size_t record_index,
                 const std::string& reason);
  GeneratorErrorKind kind() const { return kind_; }
  std::size_t record_index() const { return record_index_; }

 private:
  GeneratorErrorKind kind_;
  std::size_t record_index_;
};

struct SkippedRecord {
  std::size_t record_index = 0;  // 0-based position in the input
  std::string reason;
};

struct GenerateResult {
  TestSuite suite;
  std::vector<SkippedRecord> skipped;
};

struct GeneratorOptions {
  // Suite name; each generator has its own default when empty.
  std::string name;
  // Record invalid inputs as skipped instead of throwing GeneratorError.
  bool skip_invalid = false;
};

inline constexpr std::array<std::string_view, 7> kConnectives = {
    "although", "as", "however", "since", "though", "while", "yet"};

inline constexpr int kMaxShuffleDraws = 100;

// One item per record, every unit its own region; the shuffled condition is a
// seeded uniform permutation re-drawn until its unit order differs from the
// original. Records whose units admit no different order are skipped.
// Default name: N_all for narration, D_all for dialogue.
GenerateResult GenShuffleAll(std::span<const UnitRecord> records,
                             std::uint64_t seed,
                             const GeneratorOptions& options = {});

// Region 1 holds the context units joined by one space (original vs
// shuffled order), region 2 the fixed final unit.
// Default name: N_context / D_context.
GenerateResult GenShuffleContext(std::span<const UnitRecord> records,
                                 std::uint64_t seed,
                                 const GeneratorOptions& options = {});

// Region 1 is every sentence but the last; region 2 is the original ending
// or the distractor.
GenerateResult GenStoryCloze(std::span<const StoryRecord> records,
                             const GeneratorOptions& options = {});

enum class WinogradVariant { kFull, kPartial, kBoth };

// prefix / referent / suffix regions. kFull compares all tokens, kPartial
// only the suffix; kBoth emits both predictions in one suite.
GenerateResult GenWinograd(std::span<const WinogradRecord> records,
                           WinogradVariant variant = WinogradVariant::kBoth,
                           const GeneratorOptions& options = {});

// Pronoun vs repeated antecedent in region 2. A leading "a "/"an " on the
// antecedent becomes "the " ("The " when the article was capitalized).
// Possessive and reflexive pronouns are skipped.
GenerateResult GenCoreference(std::span<const CorefRecord> records,
                              const GeneratorOptions& options = {});

// Six items per record, one per substitute connective, tagged with the
// record's sense and the substitute.
GenerateResult GenConnectives(std::span<const ConnectiveRecord> records,
                              const GeneratorOptions& options = {});

// Contradicting pairs with and without a "[SEP]" speaker change.
GenerateResult GenSpeakerCommitment(std::span<const NliPairRecord> records,
                                    const GeneratorOptions& options = {});

// Helpers exposed for tests.
std::string MakeDefinite(std::string_view noun_phrase);
std::string MatchCapitalization(std::string_view word,
                                std::string_view model);

}  // namespace cohgym
