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

#include "cohgym/cli/runner.h"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

#include "cohgym/error.h"

namespace cohgym {

namespace {

constexpr std::string_view kSuiteSeparator = "[SEP]";

std::string ReplaceAll(std::string text, std::string_view from,
                       std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace

AlignedItem ScoreItem(Backend& backend, const BackendInfo& info,
                      std::string_view suite_name, const Item& item,
                      bool rewrite_separator) {
  std::vector<Condition> conditions = item.conditions;
  if (rewrite_separator && info.separator_literal != kSuiteSeparator) {
    for (auto& cond : conditions) {
      for (auto& region : cond.regions) {
        region.content =
            ReplaceAll(region.content, kSuiteSeparator, info.separator_literal);
      }
    }
  }

  std::vector<MaterializedCondition> texts;
  std::vector<ScoreRequest> requests;
  std::vector<std::size_t> request_of(conditions.size(), SIZE_MAX);
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    texts.push_back(Materialize(conditions[c]));
    bool blank = true;
    for (char ch : texts.back().text) blank = blank && IsAsciiSpace(ch);
    if (blank) continue;
    request_of[c] = requests.size();
    requests.push_back(ScoreRequest{std::string(suite_name) + "/" +
                                        std::to_string(item.item_number) + "/" +
                                        conditions[c].condition_name,
                                    texts.back().text});
  }
  const std::vector<ScoredSequence> scored = backend.Score(requests);

  AlignedItem aligned;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const Condition& cond = conditions[c];
    if (request_of[c] == SIZE_MAX) {
      AlignedCondition empty;
      empty.condition_name = cond.condition_name;
      for (const auto& r : cond.regions) empty.region_tokens[r.region_number];
      aligned.emplace(cond.condition_name, std::move(empty));
      continue;
    }
    const ScoredSequence& seq = scored[request_of[c]];
    aligned.emplace(cond.condition_name,
                    seq.has_offsets
                        ? Align(cond.condition_name, texts[c].spans, seq.tokens)
                        : AlignGreedyFallback(cond, seq.tokens,
                                              info.token_marker));
  }
  return aligned;
}

RunOutcome RunSuites(std::span<const TestSuite> suites,
                     const BackendFactory& factory, int parallelism) {
  std::size_t max_items = 1;
  for (const auto& s : suites) max_items = std::max(max_items, s.items.size());
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(parallelism, 1)), max_items);

  std::vector<std::unique_ptr<Backend>> backends;
  std::vector<BackendInfo> infos;
  for (std::size_t w = 0; w < workers; ++w) {
    backends.push_back(factory());
    infos.push_back(backends.back()->Handshake());
  }

  RunOutcome outcome;
  outcome.results.backend = infos.front();
  for (const auto& suite : suites) {
    if (RequiresSeparator(suite) && !infos.front().supports_separator) {
      throw SeparatorUnsupported(
          "suite '" + suite.name + "' needs a speaker separator, but backend '" +
          infos.front().backend_name + "' does not support one");
    }
  }

  for (const auto& suite : suites) {
    const bool rewrite = RequiresSeparator(suite);
    std::vector<std::optional<ItemResult>> results(suite.items.size());
    std::vector<std::exception_ptr> errors(workers);
    std::atomic<bool> failed{false};

    auto work = [&](std::size_t w) {
      try {
        for (std::size_t i = w; i < suite.items.size(); i += workers) {
          if (failed.load()) return;
          const Item& item = suite.items[i];
          const AlignedItem aligned =
              ScoreItem(*backends[w], infos[w], suite.name, item, rewrite);
          results[i] = EvaluateItem(item, aligned, suite.predictions);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        failed.store(true);
      }
    };

    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
      for (auto& t : threads) t.join();
    }

    std::vector<ItemResult> done;
    for (auto& r : results) {
      if (r) done.push_back(std::move(*r));
    }
    outcome.results.suites.push_back(BuildSuiteReport(suite, std::move(done)));
    for (const auto& e : errors) {
      if (e) {
        outcome.error = e;
        return outcome;
      }
    }
  }
  return outcome;
}

}  // namespace cohgym
