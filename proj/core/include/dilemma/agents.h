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

#ifndef DILEMMA_AGENTS_H_
#define DILEMMA_AGENTS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "dilemma/games.h"
#include "dilemma/llm_client.h"
#include "dilemma/memory.h"
#include "dilemma/rng.h"

namespace dilemma {

enum class PromptMode { kReasoning, kNoReasoning };

std::string_view PromptModeName(PromptMode mode);
PromptMode ParsePromptMode(std::string_view name);

// What one player sees when deciding round `round`.
struct Observation {
  int focal = 0;  // 0-based seat
  int round = 1;
  GameKind game = GameKind::kPrisonersDilemma;
  HistoryWindow window;
  int hl_declared = 0;
  PromptMode prompt_mode = PromptMode::kReasoning;
  double continuation_pct = 0.99;

  const GameSpec& spec() const { return GetGame(game); }
};

enum class Strategy { kAllCoop, kAllDefect, kTitForTat, kGrimTrigger, kRandomCoop };

std::string_view StrategyName(Strategy s);
Strategy ParseStrategy(std::string_view name);

struct ScriptedSpec {
  Strategy strategy = Strategy::kTitForTat;
  double p = 0.5;  // random_coop only
  std::uint64_t seed = 0;

  bool operator==(const ScriptedSpec&) const = default;
};

struct LlmSpec {
  std::string model_name;
  std::string endpoint_ref = "default";

  bool operator==(const LlmSpec&) const = default;
};

enum class Fallback { kAbort, kDefectDefault };

std::string_view FallbackName(Fallback f);
Fallback ParseFallback(std::string_view name);

struct AgentBinding {
  std::variant<ScriptedSpec, LlmSpec> kind;
  int retry_limit = 3;
  Fallback fallback = Fallback::kAbort;

  bool is_llm() const { return std::holds_alternative<LlmSpec>(kind); }
  // Short human label: "tit_for_tat", "random_coop(0.3)", "llm:<model>".
  std::string Label() const;
  bool operator==(const AgentBinding&) const = default;
};

struct Decision {
  Action action = Action::kA0;
  std::optional<std::string> trace;
  std::optional<std::string> raw_response;
  int retries_used = 0;
  bool fallback_used = false;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Decision Decide(const Observation& obs, std::string_view history_block) = 0;
};

// Deterministic game-theoretic baselines. One instance per seat per match;
// grim trigger keeps its trigger flag across rounds.
class ScriptedAgent final : public Agent {
 public:
  ScriptedAgent(ScriptedSpec spec, std::uint64_t seed);

  Decision Decide(const Observation& obs, std::string_view history_block) override;

  bool triggered() const { return triggered_; }

 private:
  Action TitForTat(const Observation& obs) const;

  ScriptedSpec spec_;
  Rng rng_;
  bool triggered_ = false;
};

// Fills the prompt template for the observation's mode and game. Pure.
std::string BuildPrompt(const Observation& obs, std::string_view history_block);

// The rules paragraph inserted into prompts for `game`.
std::string_view GameRulesText(GameKind game);

// "For Prisoner's Dilemma, the required output format is [A0 or A1]."
std::string DecisionFormatSentence(GameKind game);

// Scans lines from last to first; the first line whose trailing token,
// stripped of brackets and punctuation, is a valid action for `game` wins.
// Throws ParseFailure if no line qualifies.
Action ParseAction(std::string_view response, const GameSpec& game);

// Prompt -> completion -> parse, retrying unparseable output up to
// binding.retry_limit times, then applying binding.fallback. Abort raises
// MatchAborted; transport errors propagate.
Decision LlmDecide(const AgentBinding& binding, const Observation& obs,
                   std::string_view history_block, ChatClient& client);

class LlmAgent final : public Agent {
 public:
  LlmAgent(AgentBinding binding, ChatClient& client)
      : binding_(std::move(binding)), client_(client) {}

  Decision Decide(const Observation& obs, std::string_view history_block) override {
    return LlmDecide(binding_, obs, history_block, client_);
  }

 private:
  AgentBinding binding_;
  ChatClient& client_;
};

// Scripted bindings get a ScriptedAgent seeded from (match_seed, seat);
// LLM bindings need a client and throw ConfigError without one.
std::unique_ptr<Agent> MakeAgent(const AgentBinding& binding, int seat, std::uint64_t match_seed,
                                 ChatClient* client);

}  // namespace dilemma

#endif  // DILEMMA_AGENTS_H_
