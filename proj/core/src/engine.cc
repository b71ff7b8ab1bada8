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

#include "dilemma/engine.h"

#include <algorithm>
#include <future>

#include "dilemma/error.h"

namespace dilemma {

namespace {

constexpr std::uint64_t kHorizonStream = 0x686f72697a6f6eULL;
constexpr std::uint64_t kSanitizeStream = 0x73616e6974697aULL;

}  // namespace

void Horizon::Validate() const {
  if (kind == Kind::kFixed) {
    if (rounds < 1) throw Error(ErrorCode::kConfigError, "fixed horizon needs at least 1 round");
    return;
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kConfigError, "geometric horizon needs 0 < p < 1");
  }
  if (cap < 1) throw Error(ErrorCode::kConfigError, "geometric horizon needs cap >= 1");
}

bool Continuation(const Horizon& horizon, int t, Rng& rng) {
  if (horizon.kind == Horizon::Kind::kFixed) return t < horizon.rounds;
  return t < horizon.cap && rng.Uniform01() < horizon.p;
}

void MatchConfig::Validate() const {
  const GameSpec& g = GetGame(game);
  const auto n = static_cast<std::size_t>(g.n_players);
  if (bindings.size() != n) {
    throw Error(ErrorCode::kConfigError, std::string(GameCode(game)) + " needs " +
                                             std::to_string(n) + " agent bindings, got " +
                                             std::to_string(bindings.size()));
  }
  if (hl.size() != n) {
    throw Error(ErrorCode::kConfigError, "need one history length per player");
  }
  for (int h : hl) {
    if (h < 0) throw Error(ErrorCode::kConfigError, "history length must be >= 0");
  }
  if (!sanitization.empty() && sanitization.size() != n) {
    throw Error(ErrorCode::kConfigError, "need one sanitization config per player");
  }
  for (std::size_t i = 0; i < sanitization.size(); ++i) {
    sanitization[i].Validate();
    if (sanitization[i].mode != SanitizeMode::kOff && sanitization[i].window != hl[i]) {
      throw Error(ErrorCode::kConfigError, "sanitized player " + std::to_string(i + 1) +
                                               " must have hl equal to the sanitization window");
    }
    if (sanitization[i].mode == SanitizeMode::kPolar && game != GameKind::kTravelersDilemma) {
      throw Error(ErrorCode::kConfigError, "polar sanitization is defined for TD only");
    }
  }
  for (const AgentBinding& b : bindings) {
    if (b.retry_limit < 0) throw Error(ErrorCode::kConfigError, "retry_limit must be >= 0");
  }
  horizon.Validate();
  if (!(continuation_pct > 0.0 && continuation_pct <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "continuation_pct must be in (0, 1]");
  }
}

bool MatchConfig::HasLlm() const {
  for (const AgentBinding& b : bindings) {
    if (b.is_llm()) return true;
  }
  return false;
}

const SanitizationConfig& MatchConfig::SanitizationFor(int seat) const {
  static const SanitizationConfig kOff{};
  return sanitization.empty() ? kOff : sanitization[static_cast<std::size_t>(seat)];
}

Observation ObservationFor(const MatchConfig& cfg, std::span<const RoundRecord> history, int seat,
                           int t) {
  Observation obs;
  obs.focal = seat;
  obs.round = t;
  obs.game = cfg.game;
  obs.prompt_mode = cfg.prompt_mode;
  obs.continuation_pct = cfg.continuation_pct;
  const SanitizationConfig& san = cfg.SanitizationFor(seat);
  if (san.mode != SanitizeMode::kOff) {
    obs.window = Sanitize(history, san, GetGame(cfg.game), t,
                          MixSeed(cfg.seed, kSanitizeStream, static_cast<std::uint64_t>(seat),
                                  static_cast<std::uint64_t>(t)));
    obs.hl_declared = san.window;
  } else {
    obs.window = Window(history, cfg.hl[static_cast<std::size_t>(seat)], t);
    obs.hl_declared = cfg.hl[static_cast<std::size_t>(seat)];
  }
  return obs;
}

RunLog RunMatchWithAgents(const MatchConfig& cfg, std::span<const std::unique_ptr<Agent>> agents,
                          bool concurrent, const PromptObserver& on_prompt) {
  cfg.Validate();
  const GameSpec& game = GetGame(cfg.game);
  const int n = game.n_players;
  if (static_cast<int>(agents.size()) != n) {
    throw Error(ErrorCode::kConfigError, "need one agent per player");
  }

  RunLog log;
  log.config = cfg;
  Rng horizon_rng(MixSeed(cfg.seed, kHorizonStream));

  for (int t = 1;; ++t) {
    // Every observation is built before any agent is asked, from rounds < t.
    std::vector<Observation> obs;
    std::vector<std::string> blocks;
    obs.reserve(static_cast<std::size_t>(n));
    blocks.reserve(static_cast<std::size_t>(n));
    for (int seat = 0; seat < n; ++seat) {
      obs.push_back(ObservationFor(cfg, log.records, seat, t));
      blocks.push_back(FormatHistory(obs.back().window, seat, game));
      if (on_prompt) on_prompt(obs.back(), BuildPrompt(obs.back(), blocks.back()));
    }

    std::vector<Decision> decisions(static_cast<std::size_t>(n));
    try {
      if (concurrent) {
        std::vector<std::future<Decision>> pending;
        pending.reserve(static_cast<std::size_t>(n));
        for (int seat = 0; seat < n; ++seat) {
          const auto s = static_cast<std::size_t>(seat);
          pending.push_back(std::async(std::launch::async, [&, s] {
            return agents[s]->Decide(obs[s], blocks[s]);
          }));
        }
        std::exception_ptr first_error;
        for (int seat = 0; seat < n; ++seat) {
          try {
            decisions[static_cast<std::size_t>(seat)] = pending[static_cast<std::size_t>(seat)].get();
          } catch (...) {
            if (!first_error) first_error = std::current_exception();
          }
        }
        if (first_error) std::rethrow_exception(first_error);
      } else {
        for (int seat = 0; seat < n; ++seat) {
          const auto s = static_cast<std::size_t>(seat);
          decisions[s] = agents[s]->Decide(obs[s], blocks[s]);
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMatchAborted && e.code() != ErrorCode::kTransportError) throw;
      log.termination = {Termination::Kind::kAborted, t - 1, e.what()};
      return log;
    }

    RoundRecord rec;
    rec.round = t;
    for (const Decision& d : decisions) {
      if (!game.IsValid(d.action)) {
        throw Error(ErrorCode::kInvalidAction, "agent returned an action outside the game");
      }
      rec.actions.push_back(d.action);
      rec.traces.push_back(d.trace);
      rec.retries.push_back(d.retries_used);
      rec.fallback.push_back(d.fallback_used);
    }
    rec.payoffs = Payoff(game, rec.actions);
    log.records.push_back(std::move(rec));

    if (!Continuation(cfg.horizon, t, horizon_rng)) {
      const bool at_limit = cfg.horizon.kind == Horizon::Kind::kFixed || t >= cfg.horizon.cap;
      log.termination = {at_limit ? Termination::Kind::kHorizonReached
                                  : Termination::Kind::kGeometricStop,
                         t, ""};
      return log;
    }
  }
}

RunLog RunMatch(const MatchConfig& cfg, ChatClient* client, const PromptObserver& on_prompt) {
  cfg.Validate();
  std::vector<std::unique_ptr<Agent>> agents;
  for (std::size_t seat = 0; seat < cfg.bindings.size(); ++seat) {
    agents.push_back(MakeAgent(cfg.bindings[seat], static_cast<int>(seat), cfg.seed, client));
  }
  return RunMatchWithAgents(cfg, agents, cfg.HasLlm(), on_prompt);
}

bool ReplayVerify(const RunLog& log) {
  if (log.config.HasLlm()) {
    throw Error(ErrorCode::kUnsupportedReplay, "logs with LLM seats cannot be replayed");
  }
  const RunLog again = RunMatch(log.config);
  const std::size_t n = std::max(log.records.size(), again.records.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool both = i < log.records.size() && i < again.records.size();
    if (!both || RoundRecordToJson(log.records[i]) != RoundRecordToJson(again.records[i])) {
      throw ReplayDivergence(static_cast<int>(i) + 1,
                             "replay diverges at round " + std::to_string(i + 1));
    }
  }
  RunLog expected = again;
  expected.meta = log.meta;
  if (RunLogToJsonl(expected) != RunLogToJsonl(log)) {
    throw ReplayDivergence(static_cast<int>(n), "replay differs outside the round records");
  }
  return true;
}

std::string_view TerminationKindName(Termination::Kind kind) {
  switch (kind) {
    case Termination::Kind::kHorizonReached: return "horizon_reached";
    case Termination::Kind::kGeometricStop: return "geometric_stop";
    case Termination::Kind::kAborted: return "aborted";
  }
  return "?";
}

}  // namespace dilemma
