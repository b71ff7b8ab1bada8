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

#include "dilemma/agents.h"

#include <cctype>
#include <cstdio>
#include <vector>

#include "assets.h"
#include "dilemma/error.h"

namespace dilemma {

std::string_view PromptModeName(PromptMode mode) {
  return mode == PromptMode::kReasoning ? "reasoning" : "no_reasoning";
}

PromptMode ParsePromptMode(std::string_view name) {
  if (name == "reasoning") return PromptMode::kReasoning;
  if (name == "no_reasoning") return PromptMode::kNoReasoning;
  throw Error(ErrorCode::kConfigError, "unknown prompt mode '" + std::string(name) + "'");
}

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kAllCoop: return "all_coop";
    case Strategy::kAllDefect: return "all_defect";
    case Strategy::kTitForTat: return "tit_for_tat";
    case Strategy::kGrimTrigger: return "grim_trigger";
    case Strategy::kRandomCoop: return "random_coop";
  }
  return "?";
}

Strategy ParseStrategy(std::string_view name) {
  for (Strategy s : {Strategy::kAllCoop, Strategy::kAllDefect, Strategy::kTitForTat,
                     Strategy::kGrimTrigger, Strategy::kRandomCoop}) {
    if (StrategyName(s) == name) return s;
  }
  throw Error(ErrorCode::kConfigError, "unknown strategy '" + std::string(name) + "'");
}

std::string_view FallbackName(Fallback f) {
  return f == Fallback::kAbort ? "abort" : "defect_default";
}

Fallback ParseFallback(std::string_view name) {
  if (name == "abort") return Fallback::kAbort;
  if (name == "defect_default") return Fallback::kDefectDefault;
  throw Error(ErrorCode::kConfigError, "unknown fallback '" + std::string(name) + "'");
}

std::string AgentBinding::Label() const {
  if (const auto* llm = std::get_if<LlmSpec>(&kind)) return "llm:" + llm->model_name;
  const auto& s = std::get<ScriptedSpec>(kind);
  std::string label(StrategyName(s.strategy));
  if (s.strategy == Strategy::kRandomCoop) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "(%g)", s.p);
    label += buf;
  }
  return label;
}

// ---------------------------------------------------------------------------
// Scripted strategies.

ScriptedAgent::ScriptedAgent(ScriptedSpec spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {}

Action ScriptedAgent::TitForTat(const Observation& obs) const {
  const GameSpec& game = obs.spec();
  if (obs.round == 1 || obs.window.empty()) return game.cooperative_action;
  const HistoryEntry& last = obs.window.entries.back();
  if (game.kind == GameKind::kPublicGoods) {
    for (int j = 0; j < game.n_players; ++j) {
      if (j == obs.focal) continue;
      if (!IsCooperative(game, last.actions[static_cast<std::size_t>(j)])) {
        return DefectAction(game);
      }
    }
    return game.cooperative_action;
  }
  // Two-player games mirror the opponent. For Traveler's Dilemma this is
  // the minimum of the opponents' claims, which with one opponent is the
  // opponent's claim.
  Action mirrored = game.cooperative_action;
  bool first = true;
  for (int j = 0; j < game.n_players; ++j) {
    if (j == obs.focal) continue;
    const Action a = last.actions[static_cast<std::size_t>(j)];
    if (first || a < mirrored) mirrored = a;
    first = false;
  }
  return mirrored;
}

Decision ScriptedAgent::Decide(const Observation& obs, std::string_view /*history_block*/) {
  const GameSpec& game = obs.spec();
  Decision d;
  switch (spec_.strategy) {
    case Strategy::kAllCoop:
      d.action = game.cooperative_action;
      break;
    case Strategy::kAllDefect:
      d.action = DefectAction(game);
      break;
    case Strategy::kTitForTat:
      d.action = TitForTat(obs);
      break;
    case Strategy::kGrimTrigger:
      for (const HistoryEntry& e : obs.window.entries) {
        for (int j = 0; j < game.n_players && !triggered_; ++j) {
          if (j != obs.focal && !IsCooperative(game, e.actions[static_cast<std::size_t>(j)])) {
            triggered_ = true;
          }
        }
      }
      d.action = triggered_ ? DefectAction(game) : game.cooperative_action;
      break;
    case Strategy::kRandomCoop:
      d.action = rng_.Bernoulli(spec_.p) ? game.cooperative_action : DefectAction(game);
      break;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Prompting.

std::string_view GameRulesText(GameKind game) {
  switch (game) {
    case GameKind::kPrisonersDilemma: return assets::Get("rules_pd");
    case GameKind::kTravelersDilemma: return assets::Get("rules_td");
    case GameKind::kPublicGoods: return assets::Get("rules_pg");
    case GameKind::kTrustGame: return assets::Get("rules_tg");
  }
  return {};
}

std::string DecisionFormatSentence(GameKind game) {
  const char* format =
      game == GameKind::kTravelersDilemma ? "[A0, A1, A2, or A3]" : "[A0 or A1]";
  return "For " + std::string(GameDisplayName(game)) + ", the required output format is " +
         format + ".";
}

namespace {

std::string FillTemplate(std::string_view tmpl,
                         const std::vector<std::pair<std::string_view, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string_view key = tmpl.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [k, v] : values) {
          if (k == key) {
            out += v;
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string FormatPercent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", fraction * 100.0);
  return buf;
}

bool IsStripChar(char c) {
  return std::isspace(static_cast<unsigned char>(c)) ||
         std::string_view("[](){}<>.,;:!?*`'\"_").find(c) != std::string_view::npos;
}

std::string_view StripEdges(std::string_view s) {
  while (!s.empty() && IsStripChar(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsStripChar(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string BuildPrompt(const Observation& obs, std::string_view history_block) {
  const GameSpec& game = obs.spec();
  std::string others;
  for (int j = 0; j < game.n_players; ++j) {
    if (j == obs.focal) continue;
    if (!others.empty()) others += " and ";
    others += std::to_string(j + 1);
  }
  const std::string_view tmpl = assets::Get(
      obs.prompt_mode == PromptMode::kReasoning ? "prompt_reasoning" : "prompt_no_reasoning");
  return FillTemplate(tmpl, {
                                {"player_id", std::to_string(obs.focal + 1)},
                                {"other_id", others},
                                {"round_num", std::to_string(obs.round)},
                                {"history_length", std::to_string(obs.hl_declared)},
                                {"game_rules", std::string(GameRulesText(obs.game))},
                                {"continuation_pct", FormatPercent(obs.continuation_pct)},
                                {"history_block", std::string(history_block)},
                                {"decision_format", DecisionFormatSentence(obs.game)},
                            });
}

Action ParseAction(std::string_view response, const GameSpec& game) {
  std::size_t end = response.size();
  while (true) {
    const auto nl = end == 0 ? std::string_view::npos : response.rfind('\n', end - 1);
    const std::size_t begin = nl == std::string_view::npos ? 0 : nl + 1;
    std::string_view line = StripEdges(response.substr(begin, end - begin));
    const auto space = line.find_last_of(" \t");
    std::string_view token =
        StripEdges(space == std::string_view::npos ? line : line.substr(space + 1));
    if (token.size() == 2 && token[0] == 'A' && token[1] >= '0' && token[1] <= '3') {
      const Action a = static_cast<Action>(token[1] - '0');
      if (game.IsValid(a)) return a;
    }
    if (nl == std::string_view::npos) break;
    end = nl;
  }
  throw Error(ErrorCode::kParseFailure, "no valid action token in response");
}

Decision LlmDecide(const AgentBinding& binding, const Observation& obs,
                   std::string_view history_block, ChatClient& client) {
  const auto* llm = std::get_if<LlmSpec>(&binding.kind);
  if (llm == nullptr) throw Error(ErrorCode::kConfigError, "binding is not an LLM binding");
  const GameSpec& game = obs.spec();
  CompletionRequest request;
  request.model_name = llm->model_name;
  request.messages.push_back({"user", BuildPrompt(obs, history_block)});
  request.temperature = 0.7;
  request.max_tokens = 2000;

  const bool keep_trace = obs.prompt_mode == PromptMode::kReasoning;
  std::string last;
  for (int attempt = 0; attempt <= binding.retry_limit; ++attempt) {
    last = client.Complete(request).content;
    try {
      Decision d;
      d.action = ParseAction(last, game);
      if (keep_trace) d.trace = last;
      d.raw_response = last;
      d.retries_used = attempt;
      return d;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParseFailure) throw;
    }
  }
  if (binding.fallback == Fallback::kAbort) {
    throw Error(ErrorCode::kMatchAborted,
                "player " + std::to_string(obs.focal + 1) + " gave no parseable action in round " +
                    std::to_string(obs.round) + " after " +
                    std::to_string(binding.retry_limit + 1) + " attempts");
  }
  Decision d;
  d.action = DefectAction(game);
  if (keep_trace) d.trace = last;
  d.raw_response = last;
  d.retries_used = binding.retry_limit;
  d.fallback_used = true;
  return d;
}

std::unique_ptr<Agent> MakeAgent(const AgentBinding& binding, int seat, std::uint64_t match_seed,
                                 ChatClient* client) {
  if (const auto* s = std::get_if<ScriptedSpec>(&binding.kind)) {
    return std::make_unique<ScriptedAgent>(
        *s, MixSeed(match_seed, s->seed, static_cast<std::uint64_t>(seat)));
  }
  if (client == nullptr) {
    throw Error(ErrorCode::kConfigError, "LLM binding for seat " + std::to_string(seat + 1) +
                                             " needs a configured client");
  }
  return std::make_unique<LlmAgent>(binding, *client);
}

}  // namespace dilemma
