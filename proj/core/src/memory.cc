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

#include "dilemma/memory.h"

#include <algorithm>
#include <charconv>

#include "dilemma/error.h"
#include "dilemma/rng.h"

namespace dilemma {

namespace {

constexpr std::string_view kArrow = " \xE2\x86\x92 ";  // " → "

void CheckHistory(std::span<const RoundRecord> history, int t) {
  if (t < 1) throw Error(ErrorCode::kInconsistentHistory, "round index must be >= 1");
  if (static_cast<std::size_t>(t - 1) > history.size()) {
    throw Error(ErrorCode::kInconsistentHistory,
                "round " + std::to_string(t) + " requested but only " +
                    std::to_string(history.size()) + " rounds recorded");
  }
}

HistoryEntry ToEntry(const RoundRecord& r) { return {r.round, r.actions, r.payoffs, false}; }

HistoryEntry SyntheticEntry(const GameSpec& game, int round, JointAction actions) {
  std::vector<Points> payoffs = Payoff(game, actions);
  return {round, std::move(actions), std::move(payoffs), true};
}

int ParseInt(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseFailure, "bad integer '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

HistoryWindow Window(std::span<const RoundRecord> history, int hl, int t) {
  CheckHistory(history, t);
  if (hl < 0) throw Error(ErrorCode::kConfigError, "history length must be >= 0");
  const int available = t - 1;
  const int take = std::min(hl, available);
  HistoryWindow w;
  w.entries.reserve(static_cast<std::size_t>(take));
  for (int i = available - take; i < available; ++i) {
    w.entries.push_back(ToEntry(history[static_cast<std::size_t>(i)]));
  }
  return w;
}

std::string FormatHistoryLine(const HistoryEntry& entry, int focal) {
  const int n = static_cast<int>(entry.actions.size());
  if (focal < 0 || focal >= n) {
    throw Error(ErrorCode::kInvalidPlayer, "focal player " + std::to_string(focal + 1) +
                                               " out of range for " + std::to_string(n) +
                                               " players");
  }
  std::string line = "R" + std::to_string(entry.round) + ": You=";
  line += ActionLabel(entry.actions[static_cast<std::size_t>(focal)]);
  for (int j = 0; j < n; ++j) {
    if (j == focal) continue;
    line += ", P" + std::to_string(j + 1) + "=";
    line += ActionLabel(entry.actions[static_cast<std::size_t>(j)]);
  }
  line += kArrow;
  line += entry.payoffs[static_cast<std::size_t>(focal)].ToString();
  return line;
}

std::string FormatHistory(const HistoryWindow& window, int focal, const GameSpec& game) {
  if (focal < 0 || focal >= game.n_players) {
    throw Error(ErrorCode::kInvalidPlayer, "focal player " + std::to_string(focal + 1) +
                                               " out of range for " +
                                               std::string(GameCode(game.kind)));
  }
  std::string block;
  for (const HistoryEntry& e : window.entries) {
    if (Payoff(game, e.actions) != e.payoffs) {
      throw Error(ErrorCode::kInconsistentHistory,
                  "round " + std::to_string(e.round) + " payoffs do not match its actions");
    }
    if (!block.empty()) block += '\n';
    block += FormatHistoryLine(e, focal);
  }
  return block;
}

ParsedHistoryLine ParseHistoryLine(std::string_view line, int n_players, int focal) {
  auto fail = [&line](const char* why) {
    return Error(ErrorCode::kParseFailure, std::string(why) + ": '" + std::string(line) + "'");
  };
  if (focal < 0 || focal >= n_players) {
    throw Error(ErrorCode::kInvalidPlayer, "focal player out of range");
  }
  if (line.empty() || line[0] != 'R') throw fail("missing round marker");
  const auto colon = line.find(": ");
  if (colon == std::string_view::npos) throw fail("missing ':'");
  ParsedHistoryLine out;
  out.round = ParseInt(line.substr(1, colon - 1));
  const auto arrow = line.find(kArrow, colon);
  if (arrow == std::string_view::npos) throw fail("missing arrow");
  out.focal_payoff = Points::FromDouble(std::stod(std::string(line.substr(arrow + kArrow.size()))));

  out.actions.assign(static_cast<std::size_t>(n_players), Action::kA0);
  std::vector<bool> seen(static_cast<std::size_t>(n_players), false);
  std::string_view body = line.substr(colon + 2, arrow - colon - 2);
  while (!body.empty()) {
    const auto comma = body.find(", ");
    std::string_view item = body.substr(0, comma);
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 2);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw fail("missing '='");
    std::string_view who = item.substr(0, eq);
    int seat = 0;
    if (who == "You") {
      seat = focal;
    } else if (who.size() > 1 && who[0] == 'P') {
      seat = ParseInt(who.substr(1)) - 1;
    } else {
      throw fail("bad player label");
    }
    if (seat < 0 || seat >= n_players || seen[static_cast<std::size_t>(seat)]) {
      throw fail("player label out of range or repeated");
    }
    seen[static_cast<std::size_t>(seat)] = true;
    out.actions[static_cast<std::size_t>(seat)] = ParseActionLabel(item.substr(eq + 1));
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw fail("missing players");
  return out;
}

std::string_view SanitizeModeName(SanitizeMode mode) {
  switch (mode) {
    case SanitizeMode::kOff: return "off";
    case SanitizeMode::kIdeal: return "ideal";
    case SanitizeMode::kPolar: return "polar";
  }
  return "?";
}

SanitizeMode ParseSanitizeMode(std::string_view name) {
  if (name == "off") return SanitizeMode::kOff;
  if (name == "ideal") return SanitizeMode::kIdeal;
  if (name == "polar") return SanitizeMode::kPolar;
  throw Error(ErrorCode::kConfigError, "unknown sanitization mode '" + std::string(name) + "'");
}

void SanitizationConfig::Validate() const {
  if (window < 0 || x_real < 0 || x_real > window) {
    throw Error(ErrorCode::kConfigError, "sanitization needs 0 <= x_real <= window (got x_real=" +
                                             std::to_string(x_real) +
                                             ", window=" + std::to_string(window) + ")");
  }
}

HistoryWindow Sanitize(std::span<const RoundRecord> history, const SanitizationConfig& cfg,
                       const GameSpec& game, int t, std::uint64_t seed) {
  cfg.Validate();
  CheckHistory(history, t);
  if (cfg.mode == SanitizeMode::kOff || t <= cfg.window) return Window(history, cfg.window, t);

  const int real_rounds = t - 1;
  if (cfg.mode == SanitizeMode::kPolar && real_rounds == 0) {
    throw Error(ErrorCode::kNoEmpiricalDistribution, "no real rounds to sample from");
  }
  const int synthetic = cfg.window - cfg.x_real;
  const int first_label = t - cfg.window;

  HistoryWindow w;
  w.entries.reserve(static_cast<std::size_t>(cfg.window));
  Rng rng(seed);
  for (int i = 0; i < synthetic; ++i) {
    JointAction joint;
    if (cfg.mode == SanitizeMode::kIdeal) {
      joint.assign(static_cast<std::size_t>(game.n_players), game.cooperative_action);
    } else {
      const auto pick = rng.UniformIndex(static_cast<std::uint64_t>(real_rounds));
      joint = history[pick].actions;
      for (Action& a : joint) a = PolarRecode(game, a);
    }
    w.entries.push_back(SyntheticEntry(game, first_label + i, std::move(joint)));
  }
  for (int r = t - cfg.x_real; r < t; ++r) {
    w.entries.push_back(ToEntry(history[static_cast<std::size_t>(r - 1)]));
  }
  return w;
}

Action PolarRecode(const GameSpec& game, Action a) {
  if (game.kind != GameKind::kTravelersDilemma || !game.IsValid(a)) {
    throw Error(ErrorCode::kInvalidAction,
                "polar recoding is defined for Traveler's Dilemma claims only");
  }
  return (a == Action::kA0 || a == Action::kA1) ? Action::kA0 : Action::kA3;
}

}  // namespace dilemma
