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

#include "cohgym/gen/generators.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace cohgym {

std::string_view GeneratorErrorName(GeneratorErrorKind kind) {
  switch (kind) {
    case GeneratorErrorKind::kTooFewUnits: return "TooFewUnits";
    case GeneratorErrorKind::kMissingDistractor: return "MissingDistractor";
    case GeneratorErrorKind::kSpanNotPronoun: return "SpanNotPronoun";
    case GeneratorErrorKind::kUnknownConnective: return "UnknownConnective";
    case GeneratorErrorKind::kNonContradictionLabel:
      return "NonContradictionLabel";
    case GeneratorErrorKind::kInvalidRecord: return "InvalidRecord";
    case GeneratorErrorKind::kNoItems: return "NoItems";
  }
  return "InvalidRecord";
}

GeneratorError::GeneratorError(GeneratorErrorKind kind,
                               std::size_t record_index,
                               const std::string& reason)
    : EvaluationError("record " + std::to_string(record_index) + ": " +
                      std::string(GeneratorErrorName(kind)) + ": " + reason),
      kind_(kind),
      record_index_(record_index) {}

namespace {

// Signals that a record is dropped regardless of skip_invalid.
struct Skip {
  std::string reason;
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool HasControlChar(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x20 || u == 0x7f;
  });
}

void CheckText(std::string_view text, std::size_t index, const char* field,
               bool allow_empty = false) {
  if (!allow_empty && text.empty()) {
    throw GeneratorError(GeneratorErrorKind::kInvalidRecord, index,
                         std::string(field) + " is empty");
  }
  if (HasControlChar(text)) {
    throw GeneratorError(GeneratorErrorKind::kInvalidRecord, index,
                         std::string(field) + " contains control characters");
  }
}

Condition MakeCondition(std::string name, std::vector<std::string> contents) {
  Condition cond;
  cond.condition_name = std::move(name);
  for (std::size_t i = 0; i < contents.size(); ++i) {
    cond.regions.push_back(Region{static_cast<int>(i) + 1, std::move(contents[i])});
  }
  return cond;
}

std::string Join(std::span<const std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

// Runs `make_items` over every record, numbering items in input order and
// turning failures into skips or errors per the options. Items emitted for
// a record are discarded if the record later fails.
template <typename Record>
GenerateResult Generate(
    std::span<const Record> records, TestSuite suite,
    const GeneratorOptions& options,
    const std::function<std::vector<Item>(const Record&, std::size_t)>&
        make_items) {
  GenerateResult result;
  int next_number = 1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      for (Item& item : make_items(records[i], i)) {
        item.item_number = next_number++;
        suite.items.push_back(std::move(item));
      }
    } catch (const Skip& skip) {
      result.skipped.push_back(SkippedRecord{i, skip.reason});
    } catch (const GeneratorError& e) {
      if (!options.skip_invalid) throw;
      result.skipped.push_back(SkippedRecord{i, e.what()});
    }
  }
  if (suite.items.empty()) {
    throw GeneratorError(GeneratorErrorKind::kNoItems, records.size(),
                         "no record produced an item");
  }
  ValidateSuite(suite);
  result.suite = std::move(suite);
  return result;
}

TestSuite NewSuite(std::string name, std::string phenomenon,
                   std::map<int, std::string> region_meta,
                   std::vector<std::string> formulas) {
  TestSuite suite;
  suite.name = std::move(name);
  suite.phenomenon = std::move(phenomenon);
  suite.region_meta = std::move(region_meta);
  for (auto& f : formulas) suite.predictions.push_back(Prediction::FromFormula(f));
  return suite;
}

// Unbiased draw from [0, n) using only the engine's raw output, so results
// do not depend on the standard library's distribution implementations.
std::size_t UniformIndex(std::mt19937_64& engine, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = engine();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % range);
}

std::mt19937_64 RecordEngine(std::uint64_t seed, std::size_t index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx),
                    static_cast<std::uint32_t>(idx >> 32)};
  return std::mt19937_64(seq);
}

// Fisher-Yates until the order of contents differs from `units`.
std::vector<std::string> DistinctShuffle(const std::vector<std::string>& units,
                                         std::mt19937_64& engine) {
  std::vector<std::string> shuffled = units;
  for (int draw = 0; draw < kMaxShuffleDraws; ++draw) {
    shuffled = units;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[UniformIndex(engine, i)]);
    }
    if (shuffled != units) return shuffled;
  }
  throw Skip{"no distinct unit order after " +
             std::to_string(kMaxShuffleDraws) + " draws"};
}

void CheckUnits(const UnitRecord& record, std::size_t index) {
  if (record.units.size() < 3) {
    throw GeneratorError(GeneratorErrorKind::kTooFewUnits, index,
                         "need at least 3 units, got " +
                             std::to_string(record.units.size()));
  }
  for (const auto& u : record.units) CheckText(u, index, "unit");
}

std::string DefaultShuffleName(std::span<const UnitRecord> records,
                               const char* suffix) {
  const bool dialogue =
      !records.empty() && records.front().genre == Genre::kDialogue;
  return std::string(dialogue ? "D_" : "N_") + suffix;
}

std::string NameOr(const GeneratorOptions& options, std::string fallback) {
  return options.name.empty() ? std::move(fallback) : options.name;
}

const std::set<std::string>& PersonalPronouns() {
  static const std::set<std::string> kSet = {
      "i", "me", "you", "he", "him", "she", "her", "it", "we", "us", "they",
      "them"};
  return kSet;
}

const std::set<std::string>& PossessiveOrReflexivePronouns() {
  static const std::set<std::string> kSet = {
      "my",      "mine",     "your",     "yours",    "his",
      "hers",    "its",      "our",      "ours",     "their",
      "theirs",  "myself",   "yourself", "himself",  "herself",
      "itself",  "ourselves", "yourselves", "themselves"};
  return kSet;
}

bool IsWordByte(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         (static_cast<unsigned char>(c) & 0x80) != 0;
}

}  // namespace

std::string MatchCapitalization(std::string_view word, std::string_view model) {
  std::string out(word);
  if (out.empty() || model.empty()) return out;
  const bool upper = std::isupper(static_cast<unsigned char>(model.front()));
  out.front() = static_cast<char>(
      upper ? std::toupper(static_cast<unsigned char>(out.front()))
            : std::tolower(static_cast<unsigned char>(out.front())));
  return out;
}

std::string MakeDefinite(std::string_view noun_phrase) {
  for (std::string_view article : {"a ", "an "}) {
    if (noun_phrase.size() > article.size() &&
        Lower(noun_phrase.substr(0, article.size())) == article) {
      return MatchCapitalization("the ", noun_phrase) +
             std::string(noun_phrase.substr(article.size()));
    }
  }
  return std::string(noun_phrase);
}

GenerateResult GenShuffleAll(std::span<const UnitRecord> records,
                             std::uint64_t seed,
                             const GeneratorOptions& options) {
  std::size_t max_units = 0;
  for (const auto& r : records) max_units = std::max(max_units, r.units.size());
  std::map<int, std::string> meta;
  for (std::size_t i = 1; i <= std::max<std::size_t>(max_units, 1); ++i) {
    meta[static_cast<int>(i)] = "unit " + std::to_string(i);
  }
  TestSuite suite =
      NewSuite(NameOr(options, DefaultShuffleName(records, "all")),
               "shuffle_all", std::move(meta),
               {"mean(*;shuffled) > mean(*;original)"});
  return Generate<UnitRecord>(
      records, std::move(suite), options,
      [seed](const UnitRecord& r, std::size_t i) {
        CheckUnits(r, i);
        auto engine = RecordEngine(seed, i);
        Item item;
        item.conditions.push_back(MakeCondition("original", r.units));
        item.conditions.push_back(
            MakeCondition("shuffled", DistinctShuffle(r.units, engine)));
        return std::vector<Item>{std::move(item)};
      });
}

GenerateResult GenShuffleContext(std::span<const UnitRecord> records,
                                 std::uint64_t seed,
                                 const GeneratorOptions& options) {
  TestSuite suite =
      NewSuite(NameOr(options, DefaultShuffleName(records, "context")),
               "shuffle_context", {{1, "context"}, {2, "final unit"}},
               {"mean(2;shuffled) > mean(2;original)"});
  return Generate<UnitRecord>(
      records, std::move(suite), options,
      [seed](const UnitRecord& r, std::size_t i) {
        CheckUnits(r, i);
        auto engine = RecordEngine(seed, i);
        const std::vector<std::string> context(r.units.begin(),
                                               r.units.end() - 1);
        const std::string& last = r.units.back();
        Item item;
        item.conditions.push_back(
            MakeCondition("original", {Join(context), last}));
        item.conditions.push_back(MakeCondition(
            "shuffled", {Join(DistinctShuffle(context, engine)), last}));
        return std::vector<Item>{std::move(item)};
      });
}

GenerateResult GenStoryCloze(std::span<const StoryRecord> records,
                             const GeneratorOptions& options) {
  TestSuite suite =
      NewSuite(NameOr(options, "story_cloze"), "story_cloze",
               {{1, "context"}, {2, "ending"}},
               {"mean(2;distractor_ending) > mean(2;original_ending)"});
  return Generate<StoryRecord>(
      records, std::move(suite), options,
      [](const StoryRecord& r, std::size_t i) {
        if (r.sentences.size() < 2) {
          throw GeneratorError(GeneratorErrorKind::kTooFewUnits, i,
                               "need a context and an ending");
        }
        for (const auto& s : r.sentences) CheckText(s, i, "sentence");
        if (!r.distractor_ending || r.distractor_ending->empty()) {
          throw GeneratorError(GeneratorErrorKind::kMissingDistractor, i,
                               "record has no distractor ending");
        }
        CheckText(*r.distractor_ending, i, "distractor_ending");
        const std::string context = Join(
            std::span<const std::string>(r.sentences).first(r.sentences.size() - 1));
        Item item;
        item.conditions.push_back(
            MakeCondition("original_ending", {context, r.sentences.back()}));
        item.conditions.push_back(MakeCondition(
            "distractor_ending", {context, *r.distractor_ending}));
        return std::vector<Item>{std::move(item)};
      });
}

GenerateResult GenWinograd(std::span<const WinogradRecord> records,
                           WinogradVariant variant,
                           const GeneratorOptions& options) {
  const std::string full = "mean(*;distractor) > mean(*;target)";
  const std::string partial = "mean(3;distractor) > mean(3;target)";
  std::vector<std::string> formulas;
  std::string phenomenon = "winograd_full";
  switch (variant) {
    case WinogradVariant::kFull: formulas = {full}; break;
    case WinogradVariant::kPartial:
      formulas = {partial};
      phenomenon = "winograd_partial";
      break;
    case WinogradVariant::kBoth: formulas = {full, partial}; break;
  }
  TestSuite suite = NewSuite(NameOr(options, "winograd"), phenomenon,
                             {{1, "prefix"}, {2, "referent"}, {3, "continuation"}},
                             std::move(formulas));
  return Generate<WinogradRecord>(
      records, std::move(suite), options,
      [](const WinogradRecord& r, std::size_t i) {
        CheckText(r.prefix, i, "prefix");
        CheckText(r.target_referent, i, "target_referent");
        CheckText(r.distractor_referent, i, "distractor_referent");
        CheckText(r.suffix, i, "suffix");
        if (r.target_referent == r.distractor_referent) {
          throw GeneratorError(GeneratorErrorKind::kInvalidRecord, i,
                               "target and distractor referents are equal");
        }
        Item item;
        item.conditions.push_back(
            MakeCondition("target", {r.prefix, r.target_referent, r.suffix}));
        item.conditions.push_back(MakeCondition(
            "distractor", {r.prefix, r.distractor_referent, r.suffix}));
        return std::vector<Item>{std::move(item)};
      });
}

GenerateResult GenCoreference(std::span<const CorefRecord> records,
                              const GeneratorOptions& options) {
  TestSuite suite = NewSuite(NameOr(options, "coreference"), "coreference",
                             {{1, "context"}, {2, "continuation"}},
                             {"mean(2;repetition) > mean(2;pronoun)"});
  return Generate<CorefRecord>(
      records, std::move(suite), options,
      [](const CorefRecord& r, std::size_t i) {
        CheckText(r.context, i, "context");
        CheckText(r.continuation, i, "continuation");
        CheckText(r.antecedent_np, i, "antecedent_np");
        CheckText(r.genre, i, "genre");
        const auto [start, end] = r.pronoun_span;
        if (start >= end || end > r.continuation.size()) {
          throw GeneratorError(GeneratorErrorKind::kSpanNotPronoun, i,
                               "pronoun_span is not a byte range of the "
                               "continuation");
        }
        const bool bounded =
            (start == 0 || !IsWordByte(r.continuation[start - 1])) &&
            (end == r.continuation.size() || !IsWordByte(r.continuation[end]));
        const std::string word = Lower(r.continuation.substr(start, end - start));
        if (bounded && PossessiveOrReflexivePronouns().count(word)) {
          throw Skip{"possessive or reflexive pronoun '" + word + "'"};
        }
        if (!bounded || PersonalPronouns().count(word) == 0) {
          throw GeneratorError(GeneratorErrorKind::kSpanNotPronoun, i,
                               "'" + r.continuation.substr(start, end - start) +
                                   "' is not a pronoun token");
        }
        const std::string repeated = r.continuation.substr(0, start) +
                                     MakeDefinite(r.antecedent_np) +
                                     r.continuation.substr(end);
        Item item;
        item.tags["genre"] = r.genre;
        item.conditions.push_back(
            MakeCondition("pronoun", {r.context, r.continuation}));
        item.conditions.push_back(
            MakeCondition("repetition", {r.context, repeated}));
        return std::vector<Item>{std::move(item)};
      });
}

GenerateResult GenConnectives(std::span<const ConnectiveRecord> records,
                              const GeneratorOptions& options) {
  TestSuite suite = NewSuite(NameOr(options, "connectives"), "connectives",
                             {{1, "context"}, {2, "connective"}, {3, "continuation"}},
                             {"mean(3;manipulated) > mean(3;original)"});
  return Generate<ConnectiveRecord>(
      records, std::move(suite), options,
      [](const ConnectiveRecord& r, std::size_t i) {
        const std::string original = Lower(r.connective);
        if (std::find(kConnectives.begin(), kConnectives.end(), original) ==
            kConnectives.end()) {
          throw GeneratorError(GeneratorErrorKind::kUnknownConnective, i,
                               "'" + r.connective + "' is not one of the "
                               "seven connectives");
        }
        if (r.pre_text.empty()) {
          throw GeneratorError(GeneratorErrorKind::kInvalidRecord, i,
                               "connective is segment-initial");
        }
        CheckText(r.pre_text, i, "pre_text");
        CheckText(r.post_text, i, "post_text", /*allow_empty=*/true);
        CheckText(r.sense, i, "sense");
        std::vector<Item> items;
        for (std::string_view substitute : kConnectives) {
          if (substitute == original) continue;
          Item item;
          item.tags["sense"] = r.sense;
          item.tags["substitute"] = std::string(substitute);
          item.conditions.push_back(MakeCondition(
              "original", {r.pre_text, r.connective, r.post_text}));
          item.conditions.push_back(MakeCondition(
              "manipulated",
              {r.pre_text, MatchCapitalization(substitute, r.connective),
               r.post_text}));
          items.push_back(std::move(item));
        }
        return items;
      });
}

GenerateResult GenSpeakerCommitment(std::span<const NliPairRecord> records,
                                    const GeneratorOptions& options) {
  TestSuite suite =
      NewSuite(NameOr(options, "speaker_commitment"), "speaker_commitment",
               {{1, "context"}, {2, "utterance"}},
               {"mean(2;same_speaker) > mean(2;speaker_change)"});
  return Generate<NliPairRecord>(
      records, std::move(suite), options,
      [](const NliPairRecord& r, std::size_t i) {
        if (r.label != "contradiction") {
          const bool known = r.label == "entailment" || r.label == "neutral";
          throw GeneratorError(known ? GeneratorErrorKind::kNonContradictionLabel
                                     : GeneratorErrorKind::kInvalidRecord,
                               i, "label '" + r.label + "'");
        }
        CheckText(r.sentence_1, i, "sentence_1");
        CheckText(r.sentence_2, i, "sentence_2");
        Item item;
        item.conditions.push_back(MakeCondition(
            "speaker_change", {r.sentence_1 + " [SEP]", r.sentence_2}));
        item.conditions.push_back(
            MakeCondition("same_speaker", {r.sentence_1, r.sentence_2}));
        return std::vector<Item>{std::move(item)};
      });
}

}  // namespace cohgym
