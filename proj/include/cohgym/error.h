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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cohgym {

// Root of every error thrown by the library. Two broad families exist so the
// command line can map them onto stable exit codes: EvaluationError (bad
// input data, exit 1) and IoError (files, processes, wire protocol, exit 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---- suite model -----------------------------------------------------------

class MalformedJson : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class SchemaViolation : public EvaluationError {
 public:
  SchemaViolation(std::string path, const std::string& reason)
      : EvaluationError(path + ": " + reason), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class InconsistentConditions : public EvaluationError {
 public:
  InconsistentConditions(int item_number, const std::string& reason)
      : EvaluationError("item " + std::to_string(item_number) + ": " + reason),
        item_number_(item_number) {}
  int item_number() const { return item_number_; }

 private:
  int item_number_;
};

class ParseError : public EvaluationError {
 public:
  ParseError(std::size_t position, std::string expected)
      : EvaluationError("prediction parse error at " +
                        std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

// ---- scoring backends ------------------------------------------------------

class BackendCrashed : public IoError {
 public:
  using IoError::IoError;
};

class ProtocolViolation : public IoError {
 public:
  ProtocolViolation(std::size_t line, const std::string& reason)
      : IoError("protocol violation (line " + std::to_string(line) +
                "): " + reason),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class Timeout : public IoError {
 public:
  using IoError::IoError;
};

class CoverageGap : public IoError {
 public:
  CoverageGap(std::string request_id, std::size_t offset,
              const std::string& reason)
      : IoError("request " + request_id + ": " + reason + " at byte " +
                std::to_string(offset)),
        request_id_(std::move(request_id)),
        offset_(offset) {}
  const std::string& request_id() const { return request_id_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string request_id_;
  std::size_t offset_;
};

class EmptyCorpus : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

// ---- alignment -------------------------------------------------------------

class TokenOutOfBounds : public EvaluationError {
 public:
  explicit TokenOutOfBounds(std::size_t token_index)
      : EvaluationError("token " + std::to_string(token_index) +
                        " lies outside the condition text"),
        token_index_(token_index) {}
  std::size_t token_index() const { return token_index_; }

 private:
  std::size_t token_index_;
};

class AlignmentMismatch : public EvaluationError {
 public:
  AlignmentMismatch(std::size_t position, const std::string& reason)
      : EvaluationError("alignment mismatch at byte " +
                        std::to_string(position) + ": " + reason),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// ---- evaluation ------------------------------------------------------------

class EmptyAggregate : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class UnknownCondition : public EvaluationError {
 public:
  explicit UnknownCondition(const std::string& name)
      : EvaluationError("unknown condition '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class NoValidItems : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

}  // namespace cohgym
