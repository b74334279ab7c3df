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

// Reference scoring models. They need no ML runtime and back the offline
// test suites and the `cohgym-backend` server binary.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cohgym/backend/types.h"

namespace cohgym {

class ScoringModel {
 public:
  virtual ~ScoringModel() = default;
  virtual BackendInfo Info() const = 0;
  // Throws cohgym::Error when the text cannot be scored; Serve() turns that
  // into an error response.
  virtual ScoredSequence Score(const ScoreRequest& request) const = 0;
};

// Every whitespace token costs log2(vocab_size) bits.
class UniformModel final : public ScoringModel {
 public:
  explicit UniformModel(std::size_t vocab_size, bool supports_separator = false);

  BackendInfo Info() const override;
  ScoredSequence Score(const ScoreRequest& request) const override;

 private:
  std::size_t vocab_size_;
  bool supports_separator_;
};

// Whitespace-tokenized bigram model with add-one smoothing:
//
//   p(w | h) = (c(h, w) + 1) / (c(h) + |V|)
//
// V holds the distinct corpus tokens plus <unk>, h ranges over V and <s>
// (prepended to every line), and c(h) = sum_w c(h, w) so each conditional
// distribution sums to one over V. Unseen tokens score as <unk>.
class BigramModel final : public ScoringModel {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kUnk = "<unk>";

  // Throws EmptyCorpus when no line contains a token.
  static BigramModel Train(std::span<const std::string> corpus_lines);

  BackendInfo Info() const override;
  ScoredSequence Score(const ScoreRequest& request) const override;

  std::size_t vocab_size() const { return vocab_.size() + 1; }
  double Probability(std::string_view history, std::string_view word) const;

 private:
  BigramModel() = default;
  std::string_view Canonical(std::string_view token) const;

  std::map<std::string, std::size_t, std::less<>> vocab_;
  std::map<std::pair<std::string, std::string>, std::size_t> bigrams_;
  std::map<std::string, std::size_t, std::less<>> context_counts_;
};

// Replays scores from a fixture file. Format:
//
//   {"backend_name": "scripted",          // optional
//    "supports_separator": false,         // optional
//    "separator_literal": "[SEP]",        // optional
//    "token_marker": "",                  // optional
//    "omit_offsets": false,               // optional
//    "default_surprisal": 1.0,            // optional, for unlisted texts
//    "entries": [
//      {"text": "a b", "surprisals": [1.0, 2.0]},
//      {"text": "c d", "tokens": [{"text": "c", "start": 0, "end": 1,
//                                 "surprisal_bits": 0.5}, ...]}]}
//
// "surprisals" are matched to whitespace tokens. Texts missing from the
// fixture are scored with default_surprisal per whitespace token, or
// rejected when no default is set.
class ScriptedModel final : public ScoringModel {
 public:
  static ScriptedModel FromJson(std::string_view fixture_json);

  BackendInfo Info() const override;
  ScoredSequence Score(const ScoreRequest& request) const override;

 private:
  ScriptedModel() = default;

  BackendInfo info_;
  bool omit_offsets_ = false;
  bool has_default_ = false;
  double default_surprisal_ = 0.0;
  std::unordered_map<std::string, std::vector<TokenScore>> entries_;
};

// Runs the backend side of the wire protocol until `in` is exhausted.
// Malformed lines and scoring failures produce error responses; the loop
// keeps going. Returns the number of requests handled.
std::size_t Serve(const ScoringModel& model, std::istream& in,
                  std::ostream& out);

}  // namespace cohgym
