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

#include "cohgym/gen/records.h"

#include <functional>

#include <nlohmann/json.hpp>

namespace cohgym {

using json = nlohmann::json;

namespace {

template <typename Record>
std::vector<Record> ReadLines(
    std::string_view jsonl,
    const std::function<Record(const json&, std::size_t)>& convert) {
  std::vector<Record> records;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RecordError(line_number, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw RecordError(line_number, "expected an object");
    records.push_back(convert(j, line_number));
  }
  return records;
}

std::string Str(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw RecordError(line, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::vector<std::string> StrList(const json& j, const char* key,
                                 std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw RecordError(line, std::string("missing array field '") + key + "'");
  }
  std::vector<std::string> out;
  for (const json& v : *it) {
    if (!v.is_string()) {
      throw RecordError(line, std::string("'") + key + "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::vector<UnitRecord> ReadUnitRecords(std::string_view jsonl) {
  return ReadLines<UnitRecord>(jsonl, [](const json& j, std::size_t line) {
    if (j.contains("sentences")) {
      return UnitRecord{Genre::kNarration, StrList(j, "sentences", line)};
    }
    if (j.contains("turns")) {
      return UnitRecord{Genre::kDialogue, StrList(j, "turns", line)};
    }
    throw RecordError(line, "expected a 'sentences' or 'turns' array");
  });
}

std::vector<StoryRecord> ReadStoryRecords(std::string_view jsonl) {
  return ReadLines<StoryRecord>(jsonl, [](const json& j, std::size_t line) {
    StoryRecord r;
    r.sentences = StrList(j, "sentences", line);
    if (auto it = j.find("distractor_ending");
        it != j.end() && !it->is_null()) {
      r.distractor_ending = Str(j, "distractor_ending", line);
    }
    return r;
  });
}

std::vector<WinogradRecord> ReadWinogradRecords(std::string_view jsonl) {
  return ReadLines<WinogradRecord>(jsonl, [](const json& j, std::size_t line) {
    return WinogradRecord{Str(j, "prefix", line),
                          Str(j, "target_referent", line),
                          Str(j, "distractor_referent", line),
                          Str(j, "suffix", line)};
  });
}

std::vector<CorefRecord> ReadCorefRecords(std::string_view jsonl) {
  return ReadLines<CorefRecord>(jsonl, [](const json& j, std::size_t line) {
    CorefRecord r;
    r.context = Str(j, "context", line);
    r.continuation = Str(j, "continuation", line);
    auto span = j.find("pronoun_span");
    if (span == j.end() || !span->is_array() || span->size() != 2 ||
        !(*span)[0].is_number_unsigned() || !(*span)[1].is_number_unsigned()) {
      throw RecordError(line, "'pronoun_span' must be [start, end]");
    }
    r.pronoun_span = {(*span)[0].get<std::size_t>(),
                      (*span)[1].get<std::size_t>()};
    r.antecedent_np = Str(j, "antecedent_np", line);
    r.genre = Str(j, "genre", line);
    return r;
  });
}

std::vector<ConnectiveRecord> ReadConnectiveRecords(std::string_view jsonl) {
  return ReadLines<ConnectiveRecord>(
      jsonl, [](const json& j, std::size_t line) {
        return ConnectiveRecord{Str(j, "pre_text", line),
                                Str(j, "connective", line),
                                Str(j, "sense", line),
                                Str(j, "post_text", line)};
      });
}

std::vector<NliPairRecord> ReadNliPairRecords(std::string_view jsonl) {
  return ReadLines<NliPairRecord>(jsonl, [](const json& j, std::size_t line) {
    return NliPairRecord{Str(j, "sentence_1", line),
                         Str(j, "sentence_2", line), Str(j, "label", line)};
  });
}

}  // namespace cohgym
