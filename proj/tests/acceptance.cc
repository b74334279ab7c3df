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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Every tolerance is a named constant below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alignment_cases.h"
#include "cohgym/align/aligner.h"
#include "cohgym/backend/models.h"
#include "cohgym/cli/commands.h"
#include "cohgym/error.h"
#include "cohgym/eval/evaluator.h"
#include "cohgym/eval/report.h"
#include "cohgym/gen/generators.h"
#include "cohgym/gen/records.h"
#include "cohgym/suite/prediction.h"
#include "cohgym/suite/suite.h"
#include "test_support.h"

namespace cohgym {
namespace {

namespace fs = std::filesystem;

constexpr int kAggregateTrials = 1000;
constexpr double kMeanRelTol = 1e-12;
constexpr int kOracleSuites = 50;
constexpr int kAlignmentTrials = 1000;
constexpr double kBigramTol = 1e-9;
constexpr double kBigramFirst = 1.0;
constexpr double kGeneratorSeconds = 10.0;
constexpr int kDslTrials = 10000;
constexpr int kDslDepth = 5;

struct Outcome {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Aggregation arithmetic.

Outcome CheckAggregates() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> bits(0.0, 30.0);
  for (int trial = 0; trial < kAggregateTrials; ++trial) {
    AlignedCondition a;
    a.condition_name = "c";
    const int regions = 1 + static_cast<int>(rng() % 8);
    std::size_t total = 0;
    long double naive = 0;
    for (int r = 1; r <= regions; ++r) {
      auto& tokens = a.region_tokens[r];
      const int n = rng() % 5 == 0 ? 0 : 1 + static_cast<int>(rng() % 60);
      for (int k = 0; k < n; ++k) {
        const double v = bits(rng);
        tokens.push_back(TokenScore{"t", 0, 1, v});
        naive += v;
      }
      total += tokens.size();
    }
    if (total == 0) continue;

    const RegionAggregate star = ComputeAggregate(a, RegionSet::All());
    if (star.token_count != total) {
      return {false, "trial " + std::to_string(trial) + ": token count"};
    }
    const double expected_mean = star.sum_bits / static_cast<double>(total);
    if (std::fabs(star.mean_bits - expected_mean) >
        kMeanRelTol * std::fabs(expected_mean)) {
      return {false, "trial " + std::to_string(trial) + ": MEAN != SUM/count"};
    }
    std::vector<double> per_region;
    for (int r = 1; r <= regions; ++r) {
      if (a.region_tokens[r].empty()) {
        per_region.push_back(0.0);
        continue;
      }
      const auto one = ComputeAggregate(a, RegionSet::Of({r}));
      const double m = one.sum_bits / static_cast<double>(one.token_count);
      if (std::fabs(one.mean_bits - m) > kMeanRelTol * std::fabs(m)) {
        return {false, "trial " + std::to_string(trial) + ": region MEAN"};
      }
      per_region.push_back(one.sum_bits);
    }
    if (star.sum_bits != PairwiseSum(per_region)) {
      return {false, "trial " + std::to_string(trial) + ": STAR not additive"};
    }
    // Independent of the summation order, within rounding.
    if (std::fabs(star.sum_bits - static_cast<double>(naive)) >
        kMeanRelTol * static_cast<double>(naive)) {
      return {false, "trial " + std::to_string(trial) + ": SUM drifts from oracle"};
    }
  }
  return {true, std::to_string(kAggregateTrials) + " random aligned conditions"};
}

// ---------------------------------------------------------------------------
// Random synthetic suites with dyadic surprisals, and a brute-force
// evaluator that works on raw region text.

struct SyntheticRun {
  std::vector<TestSuite> suites;
  std::map<std::string, std::vector<double>> scores;  // text -> per word
};

Aggregate RandomAgg(std::mt19937_64& rng, const std::vector<std::string>& conds,
                    int regions) {
  Aggregate agg;
  agg.func = rng() % 2 ? AggFunc::kMean : AggFunc::kSum;
  agg.condition = conds[rng() % conds.size()];
  if (rng() % 3 == 0) {
    agg.regions = RegionSet::All();
  } else {
    std::set<int> rs;
    const int n = 1 + static_cast<int>(rng() % regions);
    for (int i = 0; i < n; ++i) rs.insert(1 + static_cast<int>(rng() % regions));
    agg.regions = RegionSet::Of(rs);
  }
  return agg;
}

PredictionPtr RandomFormula(std::mt19937_64& rng, const std::vector<std::string>& conds,
                            int regions, int depth) {
  if (depth <= 1 || rng() % 2 == 0) {
    return MakeCompare(RandomAgg(rng, conds, regions),
                       rng() % 2 ? CompareOp::kGreater : CompareOp::kLess,
                       RandomAgg(rng, conds, regions));
  }
  return MakeLogic(rng() % 2 ? LogicOp::kAnd : LogicOp::kOr,
                   RandomFormula(rng, conds, regions, depth - 1),
                   RandomFormula(rng, conds, regions, depth - 1));
}

std::vector<std::string> Words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

SyntheticRun MakeSyntheticSuites(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SyntheticRun run;
  static const std::vector<std::string> kPool = {"a", "b", "c"};
  for (int s = 0; s < kOracleSuites; ++s) {
    const int regions = 1 + static_cast<int>(rng() % 4);
    std::vector<std::string> conds(kPool.begin(),
                                   kPool.begin() + 2 + static_cast<long>(rng() % 2));
    std::vector<Item> items;
    const int n_items = 3 + static_cast<int>(rng() % 18);
    for (int i = 1; i <= n_items; ++i) {
      Item item;
      item.item_number = i;
      if (rng() % 5 != 0) item.tags["grp"] = std::string(1, char('p' + rng() % 3));
      if (rng() % 2) item.tags["half"] = i <= n_items / 2 ? "first" : "second";
      for (const auto& c : conds) {
        std::vector<std::string> contents;
        for (int r = 1; r <= regions; ++r) {
          std::string text = r == 1 ? "s" + std::to_string(s) + "i" + std::to_string(i)
                                    : "";
          const int words = static_cast<int>(rng() % 4);
          for (int w = 0; w < words; ++w) {
            if (!text.empty()) text += ' ';
            text += "w" + std::to_string(rng() % 10);
          }
          contents.push_back(text);
        }
        item.conditions.push_back(testing::MakeCondition(c, contents));
      }
      items.push_back(std::move(item));
    }
    std::vector<std::string> formulas;
    const int n_preds = 1 + static_cast<int>(rng() % 2);
    for (int p = 0; p < n_preds; ++p) {
      formulas.push_back(PrintPrediction(*RandomFormula(rng, conds, regions, 3)));
    }
    TestSuite suite = testing::MakeSuite("synthetic_" + std::to_string(s), regions,
                                         formulas, items);
    ValidateSuite(suite);
    for (const auto& item : suite.items) {
      for (const auto& cond : item.conditions) {
        const std::string text = Materialize(cond).text;
        if (run.scores.count(text)) continue;
        std::vector<double> v;
        // Multiples of 1/8 keep every sum and comparison exact.
        for (std::size_t k = 0; k < Words(text).size(); ++k) v.push_back((rng() % 41) / 8.0);
        run.scores[text] = v;
      }
    }
    run.suites.push_back(std::move(suite));
  }
  return run;
}

std::string ScriptedFixture(const SyntheticRun& run) {
  nlohmann::json root;
  root["backend_name"] = "scripted-synthetic";
  root["entries"] = nlohmann::json::array();
  for (const auto& [text, v] : run.scores) {
    root["entries"].push_back({{"text", text}, {"surprisals", v}});
  }
  return root.dump();
}

// Region -> surprisals, straight from region text and the score table.
using RawCondition = std::map<int, std::vector<double>>;

RawCondition Raw(const Condition& cond, const SyntheticRun& run) {
  std::string joined;
  for (std::size_t r = 0; r < cond.regions.size(); ++r) {
    if (r) joined += ' ';
    joined += cond.regions[r].content;
  }
  // Collapse the join the same way the words are counted.
  const auto& all = run.scores.at([&] {
    std::string t;
    for (const auto& w : Words(joined)) t += (t.empty() ? "" : " ") + w;
    return t;
  }());
  RawCondition out;
  std::size_t k = 0;
  for (std::size_t r = 0; r < cond.regions.size(); ++r) {
    auto& dst = out[static_cast<int>(r) + 1];
    for (std::size_t w = 0; w < Words(cond.regions[r].content).size(); ++w) {
      dst.push_back(all.at(k++));
    }
  }
  return out;
}

enum class V { kMet, kNotMet, kTie, kUndefined };

struct OracleCounts {
  int met = 0, not_met = 0, tie = 0, undefined = 0;
  void Add(V v) {
    if (v == V::kMet) ++met;
    if (v == V::kNotMet) ++not_met;
    if (v == V::kTie) ++tie;
    if (v == V::kUndefined) ++undefined;
  }
  bool Matches(const Tally& t) const {
    return t.met == std::size_t(met) && t.not_met == std::size_t(not_met) &&
           t.tie == std::size_t(tie) && t.undefined == std::size_t(undefined);
  }
};

V Oracle(const PredictionExpr& e, const std::map<std::string, RawCondition>& item,
         bool& undefined) {
  if (const auto* c = e.as_compare()) {
    auto value = [&](const Aggregate& a) {
      double sum = 0;
      std::size_t n = 0;
      for (const auto& [r, v] : item.at(a.condition)) {
        if (!a.regions.is_all() && !a.regions.regions().count(r)) continue;
        for (double x : v) sum += x;
        n += v.size();
      }
      if (n == 0) undefined = true;
      return n == 0 ? 0.0 : (a.func == AggFunc::kSum ? sum : sum / double(n));
    };
    const double l = value(c->lhs), r = value(c->rhs);
    if (l == r) return V::kTie;
    return (c->op == CompareOp::kGreater ? l > r : l < r) ? V::kMet : V::kNotMet;
  }
  const auto* g = e.as_logic();
  const bool l = Oracle(*g->lhs, item, undefined) == V::kMet;
  const bool r = Oracle(*g->rhs, item, undefined) == V::kMet;
  return (g->op == LogicOp::kAnd ? l && r : l || r) ? V::kMet : V::kNotMet;
}

std::string CompareToOracle(const TestSuite& suite, const SuiteReport& report,
                            const SyntheticRun& run) {
  for (std::size_t p = 0; p < suite.predictions.size(); ++p) {
    OracleCounts total;
    std::map<std::string, std::map<std::string, OracleCounts>> groups;
    std::set<std::string> keys;
    for (const auto& item : suite.items) {
      for (const auto& [k, v] : item.tags) keys.insert(k);
    }
    for (const auto& item : suite.items) {
      std::map<std::string, RawCondition> raw;
      for (const auto& c : item.conditions) raw[c.condition_name] = Raw(c, run);
      bool undefined = false;
      V v = Oracle(*suite.predictions[p].expr, raw, undefined);
      if (undefined) v = V::kUndefined;
      total.Add(v);
      for (const auto& k : keys) {
        const auto it = item.tags.find(k);
        groups[k][it == item.tags.end() ? std::string(kUntagged) : it->second].Add(v);
      }
    }
    const PredictionReport& got = report.predictions.at(p);
    if (!total.Matches(got.tally)) return suite.name + ": tally differs";
    const int valid = total.met + total.not_met + total.tie;
    const auto acc = got.tally.accuracy();
    if (valid == 0 ? acc.has_value() : (!acc || *acc != double(total.met) / valid)) {
      return suite.name + ": accuracy differs";
    }
    if (got.groups.size() != groups.size()) return suite.name + ": group keys differ";
    for (const auto& [k, values] : groups) {
      const auto it = got.groups.find(k);
      if (it == got.groups.end() || it->second.size() != values.size()) {
        return suite.name + ": groups for '" + k + "' differ";
      }
      for (const auto& [value, counts] : values) {
        const auto cell = it->second.find(value);
        if (cell == it->second.end() || !counts.Matches(cell->second)) {
          return suite.name + ": group " + k + "=" + value + " differs";
        }
      }
    }
  }
  return "";
}

struct ScratchRun {
  fs::path dir;
  SyntheticRun run;
  RunConfig config;
};

ScratchRun PrepareSynthetic() {
  ScratchRun s;
  s.dir = fs::temp_directory_path() / "cohgym_acceptance";
  fs::remove_all(s.dir);
  fs::create_directories(s.dir);
  s.run = MakeSyntheticSuites(424242);
  testing::WriteText((s.dir / "scripted.json").string(), ScriptedFixture(s.run));
  for (const auto& suite : s.run.suites) {
    const fs::path p = s.dir / (suite.name + ".json");
    testing::WriteText(p.string(), SerializeSuite(suite));
    s.config.suite_paths.push_back(p.string());
  }
  s.config.backend_command = std::string(COHGYM_BACKEND_BIN) +
                             " --model scripted --fixture " +
                             (s.dir / "scripted.json").string();
  return s;
}

int RunInto(ScratchRun& s, int parallelism, const fs::path& out_dir, std::string& err) {
  RunConfig config = s.config;
  config.parallelism = parallelism;
  config.output_dir = out_dir;
  std::ostringstream out, e;
  const int code = CmdRun(config, out, e);
  err = e.str();
  return code;
}

Outcome CheckOracle(ScratchRun& s) {
  std::string err;
  if (RunInto(s, 1, s.dir / "p1", err) != kExitOk) return {false, "run failed: " + err};
  const RunResults results =
      ParseResults(testing::ReadText((s.dir / "p1" / "results.json").string()));
  if (results.suites.size() != s.run.suites.size()) return {false, "suite count"};
  std::size_t items = 0, ties = 0, undefined = 0;
  for (std::size_t i = 0; i < s.run.suites.size(); ++i) {
    const std::string diff = CompareToOracle(s.run.suites[i], results.suites[i], s.run);
    if (!diff.empty()) return {false, diff};
    for (const auto& p : results.suites[i].predictions) {
      items += p.tally.total();
      ties += p.tally.tie;
      undefined += p.tally.undefined;
    }
  }
  return {true, std::to_string(kOracleSuites) + " suites, " + std::to_string(items) +
                    " item verdicts (" + std::to_string(ties) + " ties, " +
                    std::to_string(undefined) + " undefined)"};
}

Outcome CheckParallel(ScratchRun& s) {
  std::string err;
  if (RunInto(s, 4, s.dir / "p4", err) != kExitOk) return {false, "run failed: " + err};
  for (const char* f : {"results.json", "report.md"}) {
    if (testing::ReadText((s.dir / "p1" / f).string()) !=
        testing::ReadText((s.dir / "p4" / f).string())) {
      return {false, std::string(f) + " differs between parallelism 1 and 4"};
    }
  }
  return {true, "results.json and report.md identical for parallelism 1 and 4"};
}

// ---------------------------------------------------------------------------

Outcome CheckAlignment() {
  std::istringstream in(testing::ReadText(testing::Fixture("sentences.txt")));
  std::vector<std::string> sentences;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) sentences.push_back(line);
  }
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < kAlignmentTrials; ++trial) {
    const auto c = testing::RandomAlignmentCase(rng, sentences);
    const auto m = Materialize(c.condition);
    const auto offset = Align("c", m.spans, c.with_offsets);
    const auto greedy =
        AlignGreedyFallback(c.condition, c.without_offsets, testing::kMarker);
    std::vector<int> flat;
    for (const auto& [r, ids] : testing::Assignment(offset)) {
      flat.insert(flat.end(), ids.begin(), ids.end());
    }
    if (flat.size() != c.with_offsets.size()) {
      return {false, "trial " + std::to_string(trial) + ": token lost or duplicated"};
    }
    for (std::size_t k = 0; k < flat.size(); ++k) {
      if (flat[k] != static_cast<int>(k)) {
        return {false, "trial " + std::to_string(trial) + ": assignment out of order"};
      }
    }
    if (testing::Assignment(offset) != testing::Assignment(greedy)) {
      return {false, "trial " + std::to_string(trial) + ": offset and greedy disagree"};
    }
  }
  return {true, std::to_string(kAlignmentTrials) + " random region splits"};
}

Outcome CheckBigram() {
  // Corpus "a b a b": V = {a, b, <unk>}. c(<s>, a) = 1, c(<s>) = 1, so
  // p(a | <s>) = 2/4 = 1/2 (1 bit). c(a, b) = 2, c(a) = 2, so
  // p(b | a) = 3/5 (log2(5/3) bits).
  const double second = std::log2(5.0 / 3.0);
  const std::vector<std::string> corpus = {"a b a b"};
  const BigramModel model = BigramModel::Train(corpus);
  const ScoredSequence s = model.Score(ScoreRequest{"q", "a b"});
  if (s.tokens.size() != 2) return {false, "expected two tokens"};
  const double e1 = std::fabs(s.tokens[0].surprisal_bits - kBigramFirst);
  const double e2 = std::fabs(s.tokens[1].surprisal_bits - second);
  std::ostringstream d;
  d.precision(12);
  d << "s(a)=" << s.tokens[0].surprisal_bits << " s(b|a)=" << s.tokens[1].surprisal_bits;
  return {e1 <= kBigramTol && e2 <= kBigramTol, d.str()};
}

std::multiset<std::string> Tokens(const std::vector<std::string>& contents) {
  std::multiset<std::string> out;
  for (const auto& c : contents) {
    for (const auto& w : Words(c)) out.insert(w);
  }
  return out;
}

std::vector<std::string> Contents(const Condition& c) {
  std::vector<std::string> out;
  for (const auto& r : c.regions) out.push_back(r.content);
  return out;
}

Outcome CheckGenerators() {
  auto records = [](const std::string& name) {
    return testing::ReadText(testing::Fixture("records/" + name));
  };
  const auto start = std::chrono::steady_clock::now();
  const auto stories = ReadUnitRecords(records("stories.jsonl"));
  const auto dialogues = ReadUnitRecords(records("dialogues.jsonl"));
  const auto connective_records = ReadConnectiveRecords(records("connectives.jsonl"));
  const std::uint64_t seed = 99;

  std::vector<std::function<GenerateResult()>> gens = {
      [&] { return GenShuffleAll(stories, seed); },
      [&] { return GenShuffleContext(stories, seed); },
      [&] { return GenShuffleAll(dialogues, seed); },
      [&] { return GenShuffleContext(dialogues, seed); },
      [&] { return GenStoryCloze(ReadStoryRecords(records("stories.jsonl"))); },
      [&] { return GenWinograd(ReadWinogradRecords(records("winograd.jsonl"))); },
      [&] { return GenCoreference(ReadCorefRecords(records("coreference.jsonl"))); },
      [&] { return GenConnectives(connective_records); },
      [&] { return GenSpeakerCommitment(ReadNliPairRecords(records("nli.jsonl"))); }};

  std::size_t total_items = 0;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const GenerateResult first = gens[g]();
    const GenerateResult again = gens[g]();
    try {
      ValidateSuite(first.suite);
    } catch (const Error& e) {
      return {false, first.suite.name + " invalid: " + e.what()};
    }
    if (SerializeSuite(first.suite) != SerializeSuite(again.suite)) {
      return {false, first.suite.name + " not deterministic"};
    }
    total_items += first.suite.items.size();
    const std::string& ph = first.suite.phenomenon;
    if (ph == "shuffle_all" || ph == "shuffle_context") {
      for (const auto& item : first.suite.items) {
        const auto o = Contents(*item.find_condition("original"));
        const auto s = Contents(*item.find_condition("shuffled"));
        if (o == s) return {false, first.suite.name + ": identical order"};
        if (Tokens(o) != Tokens(s)) return {false, first.suite.name + ": multiset"};
        if (ph == "shuffle_all" &&
            std::multiset<std::string>(o.begin(), o.end()) !=
                std::multiset<std::string>(s.begin(), s.end())) {
          return {false, first.suite.name + ": unit multiset"};
        }
        if (ph == "shuffle_context" && o.back() != s.back()) {
          return {false, first.suite.name + ": final unit moved"};
        }
      }
    }
    if (ph == "connectives" &&
        first.suite.items.size() != 6 * connective_records.size()) {
      return {false, "connectives: expected 6 items per record"};
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds > kGeneratorSeconds) {
    return {false, "took " + std::to_string(seconds) + " s"};
  }
  std::ostringstream d;
  d.precision(3);
  d << gens.size() << " suites, " << total_items << " items, " << seconds << " s";
  return {true, d.str()};
}

Outcome CheckDsl() {
  std::mt19937_64 rng(8080);
  for (int trial = 0; trial < kDslTrials; ++trial) {
    const PredictionPtr e = testing::RandomPrediction(rng, kDslDepth);
    if (testing::Depth(*e) > kDslDepth) return {false, "generator exceeded depth"};
    const std::string printed = PrintPrediction(*e);
    const PredictionPtr back = ParsePrediction(printed);
    if (!(*back == *e) || PrintPrediction(*back) != printed) {
      return {false, "round trip failed on " + printed};
    }
  }
  return {true, std::to_string(kDslTrials) + " random ASTs, depth <= " +
                    std::to_string(kDslDepth)};
}

Outcome Guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace
}  // namespace cohgym

int main() {
  using namespace cohgym;
  ScratchRun synthetic;
  bool prepared = true;
  std::string prepare_error;
  try {
    synthetic = PrepareSynthetic();
  } catch (const std::exception& e) {
    prepared = false;
    prepare_error = e.what();
  }
  auto needs_synthetic = [&](Outcome (*fn)(ScratchRun&)) {
    return [&, fn] {
      if (!prepared) return Outcome{false, "setup failed: " + prepare_error};
      return fn(synthetic);
    };
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"aggregate-arithmetic", CheckAggregates},
      {"cd-oracle-equivalence", needs_synthetic(CheckOracle)},
      {"alignment-partition", CheckAlignment},
      {"reference-bigram", CheckBigram},
      {"generator-invariants", CheckGenerators},
      {"dsl-round-trip", CheckDsl},
      {"parallel-determinism", needs_synthetic(CheckParallel)}};

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const Outcome o = Guarded(fn);
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures
            << "/" << criteria.size() << '\n';
  return failures ? 1 : 0;
}
