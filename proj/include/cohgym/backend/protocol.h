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

// Newline-delimited JSON spoken between the engine and a scoring backend over
// the backend's stdin/stdout. One request per line, one response per line,
// strictly in order:
//
//   -> {"type":"info"}
//   <- {"type":"info","backend_name":...,"supports_separator":...,
//       "separator_literal":...}
//   -> {"type":"score","id":"...","text":"..."}
//   <- {"type":"scores","id":"...","tokens":[{"text":...,"start":...,
//       "end":...,"surprisal_bits":...}, ...]}
//   <- {"type":"error","id":"...","message":"..."}
//
// Info responses may additionally carry "token_marker" and
// "first_token_context". Tokens that omit both "start" and "end" mark the
// sequence as offset-less.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "cohgym/backend/types.h"

namespace cohgym::protocol {

std::string EncodeInfoRequest();
std::string EncodeScoreRequest(const ScoreRequest& request);
std::string EncodeInfoResponse(const BackendInfo& info);
std::string EncodeScoresResponse(const ScoredSequence& sequence);
std::string EncodeErrorResponse(std::string_view id, std::string_view message);

struct InfoRequest {};
using Request = std::variant<InfoRequest, ScoreRequest>;

// Server side. Throws ProtocolViolation.
Request DecodeRequest(std::string_view line, std::size_t line_number);

// Client side. Throw ProtocolViolation, including for error responses.
BackendInfo DecodeInfoResponse(std::string_view line, std::size_t line_number);
ScoredSequence DecodeScoresResponse(std::string_view line,
                                    std::string_view expected_id,
                                    std::size_t line_number);

// Checks the offset contract of a scored sequence against its request:
// spans lie inside the text and match the token text, are strictly
// increasing and non-overlapping, and every non-whitespace byte is covered.
// Throws CoverageGap for uncovered bytes, ProtocolViolation otherwise.
void ValidateScoredSequence(const ScoreRequest& request,
                            const ScoredSequence& sequence,
                            std::size_t line_number);

}  // namespace cohgym::protocol
