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

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cohgym/backend/models.h"
#include "cohgym/backend/types.h"

namespace cohgym {

// Client view of a scoring backend. Requests are served FIFO, one at a time.
// Every response is checked against the offset contract before it is
// returned, whatever the transport.
class Backend {
 public:
  virtual ~Backend() = default;

  // Performs the info exchange once and caches the result.
  const BackendInfo& Handshake();

  // One ScoredSequence per request, in request order. Empty texts are
  // rejected before anything is sent.
  std::vector<ScoredSequence> Score(std::span<const ScoreRequest> requests);

 protected:
  virtual BackendInfo DoHandshake() = 0;
  virtual ScoredSequence DoScore(const ScoreRequest& request) = 0;
  // Line number of the most recent response, for diagnostics.
  virtual std::size_t last_line() const { return 0; }

 private:
  std::optional<BackendInfo> info_;
};

// Serves a ScoringModel in the calling process. Responses go through the
// same encode/decode path as the subprocess transport.
class InProcessBackend final : public Backend {
 public:
  explicit InProcessBackend(std::shared_ptr<const ScoringModel> model)
      : model_(std::move(model)) {}

 protected:
  BackendInfo DoHandshake() override;
  ScoredSequence DoScore(const ScoreRequest& request) override;
  std::size_t last_line() const override { return line_; }

 private:
  std::shared_ptr<const ScoringModel> model_;
  std::size_t line_ = 0;
};

// Launches `/bin/sh -c <command>` and speaks the wire protocol over its
// stdin/stdout. The child is terminated when the client is destroyed.
class SubprocessBackend final : public Backend {
 public:
  SubprocessBackend(std::string command, std::chrono::milliseconds timeout);
  ~SubprocessBackend() override;

  SubprocessBackend(const SubprocessBackend&) = delete;
  SubprocessBackend& operator=(const SubprocessBackend&) = delete;

 protected:
  BackendInfo DoHandshake() override;
  ScoredSequence DoScore(const ScoreRequest& request) override;
  std::size_t last_line() const override { return line_; }

 private:
  void WriteLine(const std::string& line);
  std::string ReadLine();
  [[noreturn]] void ThrowCrashed(const std::string& what);

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::size_t line_ = 0;
};

// A backend serving a Laplace-smoothed bigram model trained on the lines.
// Throws EmptyCorpus when no line has a token.
std::unique_ptr<Backend> TrainReferenceBigram(
    std::span<const std::string> corpus_lines);

}  // namespace cohgym
