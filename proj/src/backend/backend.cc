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

#include "cohgym/backend/backend.h"

#include "cohgym/backend/protocol.h"
#include "cohgym/error.h"

namespace cohgym {

const BackendInfo& Backend::Handshake() {
  if (!info_) info_ = DoHandshake();
  return *info_;
}

std::vector<ScoredSequence> Backend::Score(
    std::span<const ScoreRequest> requests) {
  for (const auto& r : requests) {
    if (r.text.empty()) {
      throw ProtocolViolation(0, "request '" + r.id + "' has empty text");
    }
  }
  Handshake();
  std::vector<ScoredSequence> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    ScoredSequence seq = DoScore(r);
    protocol::ValidateScoredSequence(r, seq, last_line());
    out.push_back(std::move(seq));
  }
  return out;
}

BackendInfo InProcessBackend::DoHandshake() {
  ++line_;
  return protocol::DecodeInfoResponse(
      protocol::EncodeInfoResponse(model_->Info()), line_);
}

ScoredSequence InProcessBackend::DoScore(const ScoreRequest& request) {
  ++line_;
  std::string response;
  try {
    response = protocol::EncodeScoresResponse(model_->Score(request));
  } catch (const std::exception& e) {
    response = protocol::EncodeErrorResponse(request.id, e.what());
  }
  return protocol::DecodeScoresResponse(response, request.id, line_);
}

std::unique_ptr<Backend> TrainReferenceBigram(
    std::span<const std::string> corpus_lines) {
  return std::make_unique<InProcessBackend>(
      std::make_shared<const BigramModel>(BigramModel::Train(corpus_lines)));
}

}  // namespace cohgym
