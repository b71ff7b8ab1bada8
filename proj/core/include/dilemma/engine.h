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

#ifndef DILEMMA_ENGINE_H_
#define DILEMMA_ENGINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dilemma/agents.h"
#include "dilemma/games.h"
#include "dilemma/memory.h"
#include "dilemma/rng.h"

namespace dilemma {

struct Horizon {
  enum class Kind { kFixed, kGeometric };

  Kind kind = Kind::kFixed;
  int rounds = 500;  // kFixed
  double p = 0.99;   // kGeometric
  int cap = 500;     // kGeometric

  static Horizon Fixed(int n) { return {Kind::kFixed, n, 0.99, 500}; }
  static Horizon Geometric(double p, int cap) { return {Kind::kGeometric, 500, p, cap}; }

  void Validate() const;
  bool operator==(const Horizon&) const = default;
};

// Whether round t+1 is played after round t. Fixed(n): t < n.
// Geometric(p, cap): t < cap and a seeded draw lands below p.
bool Continuation(const Horizon& horizon, int t, Rng& rng);

struct MatchConfig {
  GameKind game = GameKind::kPrisonersDilemma;
  std::vector<AgentBinding> bindings;
  std::vector<int> hl;
  Horizon horizon;
  PromptMode prompt_mode = PromptMode::kReasoning;
  std::vector<SanitizationConfig> sanitization;  // empty means off for all seats
  std::uint64_t seed = 0;
  double continuation_pct = 0.99;

  // Throws ConfigError. Sanitized seats must have hl equal to the
  // sanitization window.
  void Validate() const;
  bool HasLlm() const;
  const SanitizationConfig& SanitizationFor(int seat) const;
  bool operator==(const MatchConfig&) const = default;
};

struct Termination {
  enum class Kind { kHorizonReached, kGeometricStop, kAborted };

  Kind kind = Kind::kHorizonReached;
  int round = 0;  // last round played
  std::string reason;

  bool operator==(const Termination&) const = default;
};

// Bookkeeping the sweep runner attaches to each log; carried in the JSONL
// header and used to key reports.
struct RunMeta {
  std::string run_id;
  std::string setting;
  int seed_index = 0;

  bool operator==(const RunMeta&) const = default;
};

struct RunLog {
  RunMeta meta;
  MatchConfig config;
  std::vector<RoundRecord> records;
  Termination termination;

  bool operator==(const RunLog&) const = default;
};

// Called with each prompt as it would be sent (built for every seat when
// set, including scripted seats).
using PromptObserver =
    std::function<void(const Observation& obs, std::string_view prompt)>;

// What `seat` sees at round t, given rounds 1..t-1 in `history`.
Observation ObservationFor(const MatchConfig& cfg, std::span<const RoundRecord> history, int seat,
                           int t);

// Runs one match with agents built from cfg.bindings. `client` is required
// iff a binding is an LLM binding.
RunLog RunMatch(const MatchConfig& cfg, ChatClient* client = nullptr,
                const PromptObserver& on_prompt = {});

// Runs one match with caller-provided agents (one per seat). When
// `concurrent` is set, the seats of a round are queried in parallel.
RunLog RunMatchWithAgents(const MatchConfig& cfg, std::span<const std::unique_ptr<Agent>> agents,
                          bool concurrent = false, const PromptObserver& on_prompt = {});

// Re-runs a scripted-only log from its config and seed. Returns true when
// the result is byte-identical; throws ReplayDivergence naming the first
// differing round, or UnsupportedReplay for logs with LLM seats.
bool ReplayVerify(const RunLog& log);

// JSONL run-log format: a header object, one object per round, and a
// footer object carrying the termination.
std::string MatchConfigToJson(const MatchConfig& cfg);
MatchConfig MatchConfigFromJson(std::string_view json);
std::string RoundRecordToJson(const RoundRecord& record);
std::string RunLogToJsonl(const RunLog& log);
RunLog RunLogFromJsonl(std::string_view jsonl);

std::string_view TerminationKindName(Termination::Kind kind);

}  // namespace dilemma

#endif  // DILEMMA_ENGINE_H_
