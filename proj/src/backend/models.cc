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

#include "cohgym/backend/models.h"

#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "cohgym/backend/protocol.h"
#include "cohgym/error.h"

namespace cohgym {

using json = nlohmann::json;

// ---- UniformModel ----------------------------------------------------------

UniformModel::UniformModel(std::size_t vocab_size, bool supports_separator)
    : vocab_size_(vocab_size), supports_separator_(supports_separator) {
  if (vocab_size_ < 1) throw EvaluationError("vocabulary size must be >= 1");
}

BackendInfo UniformModel::Info() const {
  BackendInfo info;
  info.backend_name = "ref-uniform";
  info.supports_separator = supports_separator_;
  info.first_token_context = "none (context-free)";
  return info;
}

ScoredSequence UniformModel::Score(const ScoreRequest& request) const {
  ScoredSequence seq{request.id, SplitWhitespace(request.text), true};
  const double bits = std::log2(static_cast<double>(vocab_size_));
  for (auto& t : seq.tokens) t.surprisal_bits = bits;
  return seq;
}

// ---- BigramModel -----------------------------------------------------------

BigramModel BigramModel::Train(std::span<const std::string> corpus_lines) {
  BigramModel model;
  std::vector<std::vector<TokenScore>> lines;
  for (const auto& line : corpus_lines) {
    auto tokens = SplitWhitespace(line);
    if (tokens.empty()) continue;
    for (const auto& t : tokens) ++model.vocab_[t.text];
    lines.push_back(std::move(tokens));
  }
  if (lines.empty()) throw EmptyCorpus("bigram corpus has no tokens");
  for (const auto& tokens : lines) {
    std::string history(kBos);
    for (const auto& t : tokens) {
      ++model.bigrams_[{history, t.text}];
      ++model.context_counts_[history];
      history = t.text;
    }
  }
  return model;
}

std::string_view BigramModel::Canonical(std::string_view token) const {
  if (token == kBos) return kBos;
  auto it = vocab_.find(token);
  return it == vocab_.end() ? kUnk : std::string_view(it->first);
}

double BigramModel::Probability(std::string_view history,
                                std::string_view word) const {
  const std::string h(Canonical(history));
  const std::string w(Canonical(word));
  std::size_t joint = 0;
  if (auto it = bigrams_.find({h, w}); it != bigrams_.end()) joint = it->second;
  std::size_t context = 0;
  if (auto it = context_counts_.find(h); it != context_counts_.end()) {
    context = it->second;
  }
  return static_cast<double>(joint + 1) /
         static_cast<double>(context + vocab_size());
}

BackendInfo BigramModel::Info() const {
  BackendInfo info;
  info.backend_name = "ref-bigram";
  info.supports_separator = false;
  info.first_token_context = std::string(kBos);
  return info;
}

ScoredSequence BigramModel::Score(const ScoreRequest& request) const {
  ScoredSequence seq{request.id, SplitWhitespace(request.text), true};
  std::string_view history = kBos;
  for (auto& t : seq.tokens) {
    t.surprisal_bits = -std::log2(Probability(history, t.text));
    history = t.text;
  }
  return seq;
}

// ---- ScriptedModel ---------------------------------------------------------

ScriptedModel ScriptedModel::FromJson(std::string_view fixture_json) {
  json root;
  try {
    root = json::parse(fixture_json);
  } catch (const json::parse_error& e) {
    throw MalformedJson(std::string("scripted fixture: ") + e.what());
  }
  if (!root.is_object()) {
    throw SchemaViolation("$", "scripted fixture must be an object");
  }
  ScriptedModel model;
  try {
    model.info_.backend_name = root.value("backend_name", "scripted");
    model.info_.supports_separator = root.value("supports_separator", false);
    model.info_.separator_literal = root.value("separator_literal", "[SEP]");
    model.info_.token_marker = root.value("token_marker", "");
    model.info_.first_token_context = root.value("first_token_context", "");
    model.omit_offsets_ = root.value("omit_offsets", false);
    if (root.contains("default_surprisal")) {
      model.has_default_ = true;
      model.default_surprisal_ = root.at("default_surprisal").get<double>();
    }
    const json& entries = root.at("entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const json& e = entries.at(i);
      const std::string path = "entries[" + std::to_string(i) + "]";
      const auto text = e.at("text").get<std::string>();
      std::vector<TokenScore> tokens;
      if (e.contains("surprisals")) {
        tokens = SplitWhitespace(text);
        const auto& s = e.at("surprisals");
        if (s.size() != tokens.size()) {
          throw SchemaViolation(path + ".surprisals",
                                "expected " + std::to_string(tokens.size()) +
                                    " values, one per whitespace token");
        }
        for (std::size_t k = 0; k < tokens.size(); ++k) {
          tokens[k].surprisal_bits = s.at(k).get<double>();
        }
      } else {
        for (const json& t : e.at("tokens")) {
          TokenScore token;
          token.text = t.at("text").get<std::string>();
          token.start = t.value("start", std::size_t{0});
          token.end = t.value("end", std::size_t{0});
          token.surprisal_bits = t.at("surprisal_bits").get<double>();
          tokens.push_back(std::move(token));
        }
      }
      model.entries_[text] = std::move(tokens);
    }
  } catch (const json::exception& e) {
    throw SchemaViolation("$", std::string("scripted fixture: ") + e.what());
  }
  return model;
}

BackendInfo ScriptedModel::Info() const { return info_; }

ScoredSequence ScriptedModel::Score(const ScoreRequest& request) const {
  ScoredSequence seq;
  seq.request_id = request.id;
  seq.has_offsets = !omit_offsets_;
  if (auto it = entries_.find(request.text); it != entries_.end()) {
    seq.tokens = it->second;
  } else if (has_default_) {
    seq.tokens = SplitWhitespace(request.text);
    for (auto& t : seq.tokens) t.surprisal_bits = default_surprisal_;
  } else {
    throw EvaluationError("no scripted scores for text: " + request.text);
  }
  return seq;
}

// ---- server loop -----------------------------------------------------------

std::size_t Serve(const ScoringModel& model, std::istream& in,
                  std::ostream& out) {
  std::string line;
  std::size_t line_number = 0;
  std::size_t handled = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::string id;
    try {
      const auto request = protocol::DecodeRequest(line, line_number);
      if (std::holds_alternative<protocol::InfoRequest>(request)) {
        out << protocol::EncodeInfoResponse(model.Info()) << '\n';
      } else {
        const auto& score = std::get<ScoreRequest>(request);
        id = score.id;
        out << protocol::EncodeScoresResponse(model.Score(score)) << '\n';
      }
    } catch (const std::exception& e) {
      out << protocol::EncodeErrorResponse(id, e.what()) << '\n';
    }
    out.flush();
    ++handled;
  }
  return handled;
}

}  // namespace cohgym
