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

#include "cohgym/backend/protocol.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "cohgym/error.h"

namespace cohgym {

std::vector<TokenScore> SplitWhitespace(std::string_view text) {
  std::vector<TokenScore> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsAsciiSpace(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !IsAsciiSpace(text[i])) ++i;
    if (i > start) {
      tokens.push_back(
          TokenScore{std::string(text.substr(start, i - start)), start, i, 0.0});
    }
  }
  return tokens;
}

namespace protocol {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

std::string Dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

json ParseObject(std::string_view line, std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolViolation(line_number, std::string("malformed JSON: ") +
                                             e.what());
  }
  if (!j.is_object()) throw ProtocolViolation(line_number, "expected an object");
  return j;
}

std::string StringMember(const json& j, const char* key,
                         std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ProtocolViolation(line_number,
                            std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::size_t OffsetMember(const json& j, const char* key,
                         std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw ProtocolViolation(line_number, std::string("field '") + key +
                                             "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

void ThrowIfError(const json& j, std::size_t line_number) {
  if (j.value("type", "") == "error") {
    const std::string message =
        j.contains("message") && j["message"].is_string()
            ? j["message"].get<std::string>()
            : std::string("(no message)");
    throw ProtocolViolation(line_number, "backend error: " + message);
  }
}

}  // namespace

std::string EncodeInfoRequest() { return R"({"type":"info"})"; }

std::string EncodeScoreRequest(const ScoreRequest& request) {
  ordered_json j;
  j["type"] = "score";
  j["id"] = request.id;
  j["text"] = request.text;
  return Dump(j);
}

std::string EncodeInfoResponse(const BackendInfo& info) {
  ordered_json j;
  j["type"] = "info";
  j["backend_name"] = info.backend_name;
  j["supports_separator"] = info.supports_separator;
  j["separator_literal"] = info.separator_literal;
  if (!info.token_marker.empty()) j["token_marker"] = info.token_marker;
  if (!info.first_token_context.empty()) {
    j["first_token_context"] = info.first_token_context;
  }
  return Dump(j);
}

std::string EncodeScoresResponse(const ScoredSequence& sequence) {
  ordered_json j;
  j["type"] = "scores";
  j["id"] = sequence.request_id;
  ordered_json tokens = ordered_json::array();
  for (const auto& t : sequence.tokens) {
    ordered_json tok;
    tok["text"] = t.text;
    if (sequence.has_offsets) {
      tok["start"] = t.start;
      tok["end"] = t.end;
    }
    tok["surprisal_bits"] = t.surprisal_bits;
    tokens.push_back(std::move(tok));
  }
  j["tokens"] = std::move(tokens);
  return Dump(j);
}

std::string EncodeErrorResponse(std::string_view id, std::string_view message) {
  ordered_json j;
  j["type"] = "error";
  j["id"] = id;
  j["message"] = message;
  return Dump(j);
}

Request DecodeRequest(std::string_view line, std::size_t line_number) {
  const json j = ParseObject(line, line_number);
  const std::string type = StringMember(j, "type", line_number);
  if (type == "info") return InfoRequest{};
  if (type == "score") {
    return ScoreRequest{StringMember(j, "id", line_number),
                        StringMember(j, "text", line_number)};
  }
  throw ProtocolViolation(line_number, "unknown request type '" + type + "'");
}

BackendInfo DecodeInfoResponse(std::string_view line, std::size_t line_number) {
  const json j = ParseObject(line, line_number);
  ThrowIfError(j, line_number);
  if (StringMember(j, "type", line_number) != "info") {
    throw ProtocolViolation(line_number, "expected an info response");
  }
  BackendInfo info;
  info.backend_name = StringMember(j, "backend_name", line_number);
  auto sep = j.find("supports_separator");
  if (sep == j.end() || !sep->is_boolean()) {
    throw ProtocolViolation(line_number,
                            "missing boolean field 'supports_separator'");
  }
  info.supports_separator = sep->get<bool>();
  if (j.contains("separator_literal")) {
    info.separator_literal = StringMember(j, "separator_literal", line_number);
  }
  if (info.supports_separator && info.separator_literal.empty()) {
    throw ProtocolViolation(line_number,
                            "separator_literal must be non-empty when "
                            "supports_separator is true");
  }
  if (j.contains("token_marker")) {
    info.token_marker = StringMember(j, "token_marker", line_number);
  }
  if (j.contains("first_token_context")) {
    info.first_token_context =
        StringMember(j, "first_token_context", line_number);
  }
  return info;
}

ScoredSequence DecodeScoresResponse(std::string_view line,
                                    std::string_view expected_id,
                                    std::size_t line_number) {
  const json j = ParseObject(line, line_number);
  ThrowIfError(j, line_number);
  if (StringMember(j, "type", line_number) != "scores") {
    throw ProtocolViolation(line_number, "expected a scores response");
  }
  ScoredSequence seq;
  seq.request_id = StringMember(j, "id", line_number);
  if (seq.request_id != expected_id) {
    throw ProtocolViolation(line_number, "response id '" + seq.request_id +
                                             "' does not match request '" +
                                             std::string(expected_id) + "'");
  }
  auto tokens = j.find("tokens");
  if (tokens == j.end() || !tokens->is_array()) {
    throw ProtocolViolation(line_number, "missing array field 'tokens'");
  }
  std::size_t with_offsets = 0;
  for (const json& t : *tokens) {
    if (!t.is_object()) {
      throw ProtocolViolation(line_number, "tokens must be objects");
    }
    TokenScore token;
    token.text = StringMember(t, "text", line_number);
    const bool has_start = t.contains("start");
    const bool has_end = t.contains("end");
    if (has_start != has_end) {
      throw ProtocolViolation(line_number,
                              "token carries only one of 'start'/'end'");
    }
    if (has_start) {
      token.start = OffsetMember(t, "start", line_number);
      token.end = OffsetMember(t, "end", line_number);
      ++with_offsets;
    }
    auto s = t.find("surprisal_bits");
    if (s == t.end() || !s->is_number()) {
      throw ProtocolViolation(line_number,
                              "token field 'surprisal_bits' must be a number");
    }
    token.surprisal_bits = s->get<double>();
    if (!std::isfinite(token.surprisal_bits) || token.surprisal_bits < 0.0) {
      throw ProtocolViolation(line_number,
                              "surprisal must be finite and non-negative");
    }
    seq.tokens.push_back(std::move(token));
  }
  if (with_offsets != 0 && with_offsets != seq.tokens.size()) {
    throw ProtocolViolation(line_number,
                            "offsets must be given for all tokens or none");
  }
  seq.has_offsets = seq.tokens.empty() || with_offsets == seq.tokens.size();
  return seq;
}

void ValidateScoredSequence(const ScoreRequest& request,
                            const ScoredSequence& sequence,
                            std::size_t line_number) {
  const std::string& text = request.text;
  auto require_whitespace = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      if (!IsAsciiSpace(text[i])) {
        throw CoverageGap(request.id, i, "non-whitespace byte left unscored");
      }
    }
  };
  if (!sequence.has_offsets) {
    if (sequence.tokens.empty()) require_whitespace(0, text.size());
    return;
  }
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < sequence.tokens.size(); ++k) {
    const TokenScore& t = sequence.tokens[k];
    const std::string where = "token " + std::to_string(k) + ": ";
    if (t.start >= t.end) {
      throw ProtocolViolation(line_number, where + "empty or inverted span");
    }
    if (t.end > text.size()) {
      throw ProtocolViolation(line_number, where + "span exceeds text length");
    }
    if (t.start < cursor) {
      throw ProtocolViolation(line_number,
                              where + "span overlaps or precedes its predecessor");
    }
    if (text.compare(t.start, t.end - t.start, t.text) != 0) {
      throw ProtocolViolation(line_number,
                              where + "text does not match its byte span");
    }
    require_whitespace(cursor, t.start);
    cursor = t.end;
  }
  require_whitespace(cursor, text.size());
}

}  // namespace protocol
}  // namespace cohgym
