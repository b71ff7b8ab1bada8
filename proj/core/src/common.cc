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

#include "dilemma/error.h"
#include "dilemma/rng.h"

namespace dilemma {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidAction: return "InvalidAction";
    case ErrorCode::kArityError: return "ArityError";
    case ErrorCode::kInvalidPlayer: return "InvalidPlayer";
    case ErrorCode::kInconsistentHistory: return "InconsistentHistory";
    case ErrorCode::kNoEmpiricalDistribution: return "NoEmpiricalDistribution";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kMatchAborted: return "MatchAborted";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kReplayDivergence: return "ReplayDivergence";
    case ErrorCode::kUnsupportedReplay: return "UnsupportedReplay";
    case ErrorCode::kEmptyRun: return "EmptyRun";
    case ErrorCode::kInvalidGrouping: return "InvalidGrouping";
    case ErrorCode::kNoTraces: return "NoTraces";
    case ErrorCode::kJudgeParseError: return "JudgeParseError";
    case ErrorCode::kMissingScores: return "MissingScores";
    case ErrorCode::kSplitImpossible: return "SplitImpossible";
    case ErrorCode::kEmptyPlan: return "EmptyPlan";
    case ErrorCode::kNoRuns: return "NoRuns";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::uint64_t Rng::UniformIndex(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t StableHash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dilemma
