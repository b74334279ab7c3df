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

#include <random>

#include "alignment_cases.h"
#include "cohgym/align/aligner.h"
#include "cohgym/error.h"
#include "doctest.h"
#include "test_support.h"

namespace cohgym {
namespace {

using testing::MakeCondition;

std::vector<std::string> Texts(const std::vector<TokenScore>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

TEST_CASE("materialize joins regions with single spaces") {
  const auto m =
      Materialize(MakeCondition("match", {"The woman", "plays", "the guitar"}));
  CHECK(m.text == "The woman plays the guitar");
  REQUIRE(m.spans.size() == 3);
  CHECK(m.spans[0] == RegionSpan{1, 0, 9});
  CHECK(m.spans[1] == RegionSpan{2, 10, 15});
  CHECK(m.spans[2] == RegionSpan{3, 16, 26});

  const auto single = Materialize(MakeCondition("c", {"x"}));
  CHECK(single.text == "x");
  CHECK(single.spans[0] == RegionSpan{1, 0, 1});
}

TEST_CASE("empty regions are zero width at the join point") {
  const auto m = Materialize(MakeCondition("c", {"a", "", "b"}));
  CHECK(m.text == "a b");
  CHECK(m.spans[1] == RegionSpan{2, 2, 2});
  const auto leading = Materialize(MakeCondition("c", {"", "a"}));
  CHECK(leading.text == "a");
  CHECK(leading.spans[0] == RegionSpan{1, 0, 0});
  const auto trailing = Materialize(MakeCondition("c", {"a", ""}));
  CHECK(trailing.spans[1] == RegionSpan{2, 1, 1});
}

TEST_CASE("offset alignment by token start") {
  const Condition cond = MakeCondition("match", {"The woman", "plays", "the guitar"});
  const auto m = Materialize(cond);
  const auto tokens = SplitWhitespace(m.text);
  const auto a = Align("match", m.spans, tokens);
  CHECK(Texts(a.region_tokens.at(1)) == std::vector<std::string>{"The", "woman"});
  CHECK(Texts(a.region_tokens.at(2)) == std::vector<std::string>{"plays"});
  CHECK(Texts(a.region_tokens.at(3)) == std::vector<std::string>{"the", "guitar"});
  CHECK(a.token_count() == 5);
}

TEST_CASE("boundary tokens go to the region where they start") {
  const Condition cond = MakeCondition("c", {"The woman", "plays", "the guitar"});
  const auto m = Materialize(cond);
  // "ys the" starts in region 2 and ends in region 3.
  const std::vector<TokenScore> straddle = {{"The woman pla", 0, 13, 1},
                                            {"ys the", 13, 19, 1},
                                            {" guitar", 19, 26, 1}};
  const auto a = Align("c", m.spans, straddle);
  CHECK(a.region_tokens.at(1).size() == 1);
  CHECK(Texts(a.region_tokens.at(2)) == std::vector<std::string>{"ys the"});
  CHECK(a.region_tokens.at(3).size() == 1);

  // A token covering the joining space and the next word.
  const std::vector<TokenScore> spaced = {{"The", 0, 3, 1},
                                          {" woman", 3, 9, 1},
                                          {" plays", 9, 15, 1},
                                          {" the", 15, 19, 1},
                                          {" guitar", 19, 26, 1}};
  const auto b = Align("c", m.spans, spaced);
  CHECK(Texts(b.region_tokens.at(2)) == std::vector<std::string>{" plays"});
  CHECK(Texts(b.region_tokens.at(3)) ==
        std::vector<std::string>{" the", " guitar"});
}

TEST_CASE("zero width regions receive no tokens") {
  const Condition cond = MakeCondition("c", {"a", "", "b"});
  const auto m = Materialize(cond);
  const auto a = Align("c", m.spans, SplitWhitespace(m.text));
  CHECK(a.region_tokens.at(2).empty());
  CHECK(a.region_tokens.at(3).size() == 1);
}

TEST_CASE("token past the text is out of bounds") {
  const auto m = Materialize(MakeCondition("c", {"a", "b"}));
  const std::vector<TokenScore> tokens = {{"a", 0, 1, 1}, {"x", 3, 4, 1}};
  try {
    Align("c", m.spans, tokens);
    FAIL("expected TokenOutOfBounds");
  } catch (const TokenOutOfBounds& e) {
    CHECK(e.token_index() == 1);
  }
}

TEST_CASE("greedy fallback with leading space markers") {
  const Condition cond = MakeCondition("c", {"The woman", "plays", "the guitar"});
  const std::string g = testing::kMarker;
  const std::vector<TokenScore> marked = {{"The", 0, 0, 0},
                                          {g + "woman", 0, 0, 1},
                                          {g + "plays", 0, 0, 2},
                                          {g + "the", 0, 0, 3},
                                          {g + "guitar", 0, 0, 4}};
  const auto greedy = AlignGreedyFallback(cond, marked, testing::kMarker);
  const auto m = Materialize(cond);
  const auto offset = Align("c", m.spans, SplitWhitespace(m.text));
  CHECK(testing::Assignment(greedy) ==
        std::map<int, std::vector<int>>{{1, {0, 1}}, {2, {2}}, {3, {3, 4}}});
  for (int r = 1; r <= 3; ++r) {
    CHECK(greedy.region_tokens.at(r).size() == offset.region_tokens.at(r).size());
  }
  // The original token text is kept; offsets point at the matched bytes.
  CHECK(greedy.region_tokens.at(1)[1].text == g + "woman");
  CHECK(greedy.region_tokens.at(1)[1].start == 4);

  // Literal leading spaces work without a marker.
  const std::vector<TokenScore> spaced = {{"The", 0, 0, 0},   {" woman", 0, 0, 1},
                                          {" plays", 0, 0, 2}, {" the", 0, 0, 3},
                                          {" guitar", 0, 0, 4}};
  CHECK(testing::Assignment(AlignGreedyFallback(cond, spaced)) ==
        testing::Assignment(greedy));
}

TEST_CASE("greedy fallback with whitespace words is one to one") {
  const Condition cond = MakeCondition("c", {"a b", "c", "d e f"});
  const auto tokens = SplitWhitespace(Materialize(cond).text);
  const auto a = AlignGreedyFallback(cond, tokens);
  CHECK(a.region_tokens.at(1).size() == 2);
  CHECK(a.region_tokens.at(2).size() == 1);
  CHECK(a.region_tokens.at(3).size() == 3);
}

TEST_CASE("greedy token straddling a boundary stays where it started") {
  const Condition cond = MakeCondition("c", {"The woman", "plays", "loud"});
  const std::vector<TokenScore> tokens = {
      {"The", 0, 0, 0}, {"womanplays", 0, 0, 1}, {"loud", 0, 0, 2}};
  const auto a = AlignGreedyFallback(cond, tokens);
  CHECK(testing::Assignment(a) ==
        std::map<int, std::vector<int>>{{1, {0, 1}}, {2, {}}, {3, {2}}});
}

TEST_CASE("greedy mismatch reports a position") {
  const Condition cond = MakeCondition("c", {"abc", "def"});
  const std::vector<TokenScore> wrong = {{"abc", 0, 0, 0}, {"dxf", 0, 0, 1}};
  try {
    AlignGreedyFallback(cond, wrong);
    FAIL("expected AlignmentMismatch");
  } catch (const AlignmentMismatch& e) {
    CHECK(e.position() == 5);
  }
  const std::vector<TokenScore> short_by_one = {{"abc", 0, 0, 0}, {"de", 0, 0, 1}};
  CHECK_THROWS_AS(AlignGreedyFallback(cond, short_by_one), AlignmentMismatch);
  const std::vector<TokenScore> too_long = {{"abcdefg", 0, 0, 0}};
  CHECK_THROWS_AS(AlignGreedyFallback(cond, too_long), AlignmentMismatch);
}

TEST_CASE("punctuation-only tokens are never dropped") {
  const Condition cond = MakeCondition("c", {"Wait", "!", "..."});
  const std::vector<TokenScore> tokens = {
      {"Wait", 0, 4, 0}, {" !", 4, 6, 1}, {" .", 6, 8, 2}, {"..", 8, 10, 3}};
  const auto a = Align("c", Materialize(cond).spans, tokens);
  CHECK(testing::Assignment(a) ==
        std::map<int, std::vector<int>>{{1, {0}}, {2, {1}}, {3, {2, 3}}});
}

TEST_CASE("partition and path agreement over random splits") {
  std::istringstream in(testing::ReadText(testing::Fixture("sentences.txt")));
  std::vector<std::string> sentences;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) sentences.push_back(line);
  }
  REQUIRE(!sentences.empty());

  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = testing::RandomAlignmentCase(rng, sentences);
    const auto m = Materialize(c.condition);
    const auto offset = Align("c", m.spans, c.with_offsets);
    const auto greedy =
        AlignGreedyFallback(c.condition, c.without_offsets, testing::kMarker);

    // Every token index appears exactly once, in order.
    std::vector<int> flat;
    for (const auto& [r, ids] : testing::Assignment(offset)) {
      flat.insert(flat.end(), ids.begin(), ids.end());
    }
    REQUIRE(flat.size() == c.with_offsets.size());
    for (std::size_t k = 0; k < flat.size(); ++k) REQUIRE(flat[k] == int(k));
    REQUIRE(testing::Assignment(offset) == testing::Assignment(greedy));
  }
}

}  // namespace
}  // namespace cohgym
