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

#include <chrono>
#include <string>

#include "cohgym/backend/backend.h"
#include "cohgym/backend/protocol.h"
#include "cohgym/error.h"
#include "doctest.h"
#include "test_support.h"

namespace cohgym {
namespace {

using namespace std::chrono_literals;
namespace proto = protocol;

std::string Fake(const std::string& script) {
  return "/bin/sh " + testing::Fixture("fake/" + script);
}

std::string RefBackend(const std::string& args) {
  return std::string(COHGYM_BACKEND_BIN) + " " + args;
}

TEST_CASE("wire format is bit exact") {
  CHECK(proto::EncodeInfoRequest() == R"({"type":"info"})");
  CHECK(proto::EncodeScoreRequest({"s/1/a", "x \"y\""}) ==
        R"({"type":"score","id":"s/1/a","text":"x \"y\""})");
  BackendInfo info;
  info.backend_name = "ref-bigram";
  CHECK(proto::EncodeInfoResponse(info) ==
        R"({"type":"info","backend_name":"ref-bigram","supports_separator":false,"separator_literal":"[SEP]"})");
  CHECK(proto::EncodeErrorResponse("7", "boom") ==
        R"({"type":"error","id":"7","message":"boom"})");
}

TEST_CASE("requests decode to their variant") {
  CHECK(std::holds_alternative<proto::InfoRequest>(
      proto::DecodeRequest(R"({"type":"info"})", 1)));
  const auto r = proto::DecodeRequest(R"({"type":"score","id":"i","text":"t"})", 2);
  CHECK(std::get<ScoreRequest>(r).text == "t");
  CHECK_THROWS_AS(proto::DecodeRequest("[1]", 3), ProtocolViolation);
  CHECK_THROWS_AS(proto::DecodeRequest(R"({"type":"score","id":"i"})", 4),
                  ProtocolViolation);
}

TEST_CASE("info responses") {
  const BackendInfo info = proto::DecodeInfoResponse(
      R"({"type":"info","backend_name":"dlg","supports_separator":true,"separator_literal":"<|endoftext|>","token_marker":"Ġ"})",
      1);
  CHECK(info.supports_separator);
  CHECK(info.separator_literal == "<|endoftext|>");
  CHECK(info.token_marker == "Ġ");
  CHECK(proto::DecodeInfoResponse(proto::EncodeInfoResponse(info), 1) == info);

  CHECK_THROWS_AS(proto::DecodeInfoResponse("garbage", 1), ProtocolViolation);
  CHECK_THROWS_AS(proto::DecodeInfoResponse(R"({"type":"scores"})", 1),
                  ProtocolViolation);
  // A separator-capable backend must name its literal.
  CHECK_THROWS_AS(
      proto::DecodeInfoResponse(
          R"({"type":"info","backend_name":"x","supports_separator":true,"separator_literal":""})",
          1),
      ProtocolViolation);
}

TEST_CASE("scores responses") {
  ScoredSequence seq{"q", {{"a", 0, 1, 1.0}, {"bc", 2, 4, 0.5}}, true};
  const std::string line = proto::EncodeScoresResponse(seq);
  CHECK(proto::DecodeScoresResponse(line, "q", 1) == seq);
  CHECK_THROWS_AS(proto::DecodeScoresResponse(line, "other", 1),
                  ProtocolViolation);

  try {
    proto::DecodeScoresResponse(R"({"type":"error","id":"q","message":"oom"})",
                                "q", 9);
    FAIL("expected ProtocolViolation");
  } catch (const ProtocolViolation& e) {
    CHECK(e.line() == 9);
    CHECK(std::string(e.what()).find("oom") != std::string::npos);
  }

  CHECK_THROWS_AS(
      proto::DecodeScoresResponse(
          R"({"type":"scores","id":"q","tokens":[{"text":"a","start":0,"end":1,"surprisal_bits":-1}]})",
          "q", 1),
      ProtocolViolation);
  // Offsets must be given for every token or for none.
  CHECK_THROWS_AS(
      proto::DecodeScoresResponse(
          R"({"type":"scores","id":"q","tokens":[{"text":"a","start":0,"end":1,"surprisal_bits":1},{"text":"b","surprisal_bits":1}]})",
          "q", 1),
      ProtocolViolation);

  const ScoredSequence bare = proto::DecodeScoresResponse(
      R"({"type":"scores","id":"q","tokens":[{"text":"a","surprisal_bits":1}]})",
      "q", 1);
  CHECK_FALSE(bare.has_offsets);
  CHECK(proto::EncodeScoresResponse(bare) ==
        R"({"type":"scores","id":"q","tokens":[{"text":"a","surprisal_bits":1.0}]})");
}

TEST_CASE("client side span validation") {
  const ScoreRequest req{"r", "ab  cd"};
  auto check = [&](ScoredSequence s) {
    proto::ValidateScoredSequence(req, s, 1);
  };
  CHECK_NOTHROW(check({"r", {{"ab", 0, 2, 1}, {"  cd", 2, 6, 1}}, true}));
  CHECK_NOTHROW(check({"r", {{"a", 0, 1, 1}, {"b", 1, 2, 1}, {"cd", 4, 6, 1}}, true}));
  CHECK_THROWS_AS(check({"r", {{"ab", 0, 2, 1}}, true}), CoverageGap);
  CHECK_THROWS_AS(check({"r", {{"b", 1, 2, 1}, {"cd", 4, 6, 1}}, true}),
                  CoverageGap);
  CHECK_THROWS_AS(check({"r", {{"ab", 0, 2, 1}, {"b", 1, 2, 1}}, true}),
                  ProtocolViolation);
  CHECK_THROWS_AS(check({"r", {{"xx", 0, 2, 1}, {"cd", 4, 6, 1}}, true}),
                  ProtocolViolation);
  CHECK_THROWS_AS(check({"r", {{"", 0, 0, 1}}, true}), ProtocolViolation);
  CHECK_THROWS_AS(check({"r", {{"cd?", 4, 7, 1}}, true}), ProtocolViolation);
  try {
    check({"r", {{"ab", 0, 2, 1}, {"c", 4, 5, 1}}, true});
    FAIL("expected CoverageGap");
  } catch (const CoverageGap& e) {
    CHECK(e.request_id() == "r");
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("subprocess client against the reference backend") {
  SubprocessBackend b(RefBackend("--model uniform --vocab-size 4"), 10s);
  CHECK(b.Handshake().backend_name == "ref-uniform");
  const std::vector<ScoreRequest> reqs = {{"1", "a b"}, {"2", "the  café"}};
  const auto out = b.Score(reqs);
  REQUIRE(out.size() == 2);
  CHECK(out[0].tokens[0].surprisal_bits == 2.0);
  CHECK(out[1].request_id == "2");
  CHECK(out[1].tokens[1].text == "café");
  CHECK(out[1].tokens[1].start == 5);
  // The process stays alive across batches.
  CHECK(b.Score(reqs) == out);
}

TEST_CASE("subprocess bigram server matches in-process values") {
  const std::string corpus = testing::Fixture("corpus_abab.txt");
  SubprocessBackend b(RefBackend("--model bigram --corpus " + corpus), 10s);
  const ScoreRequest req{"x", "a b"};
  const auto out = b.Score(std::span<const ScoreRequest>(&req, 1));
  CHECK(std::fabs(out[0].tokens[0].surprisal_bits - 1.0) < 1e-9);
  CHECK(std::fabs(out[0].tokens[1].surprisal_bits - 0.7369655941662062) < 1e-9);
  CHECK(b.Handshake().first_token_context == "<s>");
}

TEST_CASE("malformed first line is a protocol violation") {
  SubprocessBackend b(Fake("malformed_info.sh"), 10s);
  CHECK_THROWS_AS(b.Handshake(), ProtocolViolation);
}

TEST_CASE("backend exit is reported as a crash") {
  SubprocessBackend b(Fake("crash_after_info.sh"), 10s);
  CHECK(b.Handshake().backend_name == "crashy");
  const ScoreRequest req{"x", "a b"};
  try {
    b.Score(std::span<const ScoreRequest>(&req, 1));
    FAIL("expected BackendCrashed");
  } catch (const BackendCrashed& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("silent backend times out") {
  SubprocessBackend b(Fake("silent.sh"), 300ms);
  const auto t0 = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(b.Handshake(), Timeout);
  CHECK(std::chrono::steady_clock::now() - t0 < 5s);
}

TEST_CASE("unscored bytes raise a coverage gap") {
  SubprocessBackend b(Fake("gap.sh"), 10s);
  const ScoreRequest req{"gap-1", "a b"};
  try {
    b.Score(std::span<const ScoreRequest>(&req, 1));
    FAIL("expected CoverageGap");
  } catch (const CoverageGap& e) {
    CHECK(e.request_id() == "gap-1");
    CHECK(e.offset() == 2);
  }
}

TEST_CASE("mismatched response id") {
  SubprocessBackend b(Fake("wrong_id.sh"), 10s);
  const ScoreRequest req{"fresh", "a"};
  CHECK_THROWS_AS(b.Score(std::span<const ScoreRequest>(&req, 1)),
                  ProtocolViolation);
}

TEST_CASE("command that cannot run") {
  SubprocessBackend b("/nonexistent/backend-binary", 2s);
  CHECK_THROWS_AS(b.Handshake(), IoError);
}

TEST_CASE("backend error responses surface the message") {
  // Scripted backend without a default refuses unknown texts.
  SubprocessBackend b(
      RefBackend("--model scripted --fixture " +
                 testing::Fixture("scripted_four_items.json")),
      10s);
  const ScoreRequest req{"x", "text the fixture never heard of"};
  try {
    b.Score(std::span<const ScoreRequest>(&req, 1));
    FAIL("expected ProtocolViolation");
  } catch (const ProtocolViolation& e) {
    CHECK(std::string(e.what()).find("no scripted scores") != std::string::npos);
  }
}

}  // namespace
}  // namespace cohgym
