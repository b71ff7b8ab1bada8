// Copyright 2026 The Dilemma Authors
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

#ifndef DILEMMA_ERROR_H_
#define DILEMMA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dilemma {

// Every failure the library reports is a dilemma::Error carrying one of
// these codes. Callers that need to branch on the failure kind switch on
// code(); everyone else can treat it as a std::runtime_error.
enum class ErrorCode {
  kInvalidAction,
  kArityError,
  kInvalidPlayer,
  kInconsistentHistory,
  kNoEmpiricalDistribution,
  kParseFailure,
  kMatchAborted,
  kConfigError,
  kTransportError,
  kReplayDivergence,
  kUnsupportedReplay,
  kEmptyRun,
  kInvalidGrouping,
  kNoTraces,
  kJudgeParseError,
  kMissingScores,
  kSplitImpossible,
  kEmptyPlan,
  kNoRuns,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const { return code_; }
  // what() without the leading code name.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

// Raised by replay verification; remembers the first round that differs.
class ReplayDivergence : public Error {
 public:
  ReplayDivergence(int round, const std::string& message)
      : Error(ErrorCode::kReplayDivergence, message), round_(round) {}

  int round() const { return round_; }

 private:
  int round_;
};

}  // namespace dilemma

#endif  // DILEMMA_ERROR_H_
