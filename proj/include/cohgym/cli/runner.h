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

#pragma once

#include <exception>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "cohgym/align/aligner.h"
#include "cohgym/backend/backend.h"
#include "cohgym/error.h"
#include "cohgym/eval/report.h"
#include "cohgym/suite/suite.h"

namespace cohgym {

class SeparatorUnsupported : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

using BackendFactory = std::function<std::unique_ptr<Backend>()>;

// Scores every condition of `item` in one request batch and aligns the
// results. Conditions whose text is empty are not sent and align to empty
// regions. When `rewrite_separator` is set, "[SEP]" literals in region
// contents are replaced by the backend's separator literal first.
AlignedItem ScoreItem(Backend& backend, const BackendInfo& info,
                      std::string_view suite_name, const Item& item,
                      bool rewrite_separator);

struct RunOutcome {
  RunResults results;     // Complete, or the items finished before a failure.
  std::exception_ptr error;  // Null on success.
};

// Launches min(parallelism, max items) backends through `factory`, shards
// the items of each suite round-robin across them, and assembles reports in
// item order. Throws SeparatorUnsupported before scoring anything if a suite
// needs a speaker separator the backend lacks. Other failures during scoring
// come back in RunOutcome::error with partial results.
RunOutcome RunSuites(std::span<const TestSuite> suites,
                     const BackendFactory& factory, int parallelism);

}  // namespace cohgym
