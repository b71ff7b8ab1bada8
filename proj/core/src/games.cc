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

#include "dilemma/games.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "dilemma/error.h"

namespace dilemma {

std::string_view ActionLabel(Action a) {
  switch (a) {
    case Action::kA0: return "A0";
    case Action::kA1: return "A1";
    case Action::kA2: return "A2";
    case Action::kA3: return "A3";
  }
  return "A?";
}

Action ParseActionLabel(std::string_view label) {
  if (label.size() == 2 && label[0] == 'A' && label[1] >= '0' && label[1] <= '3') {
    return static_cast<Action>(label[1] - '0');
  }
  throw Error(ErrorCode::kInvalidAction, "not an action label: '" + std::string(label) + "'");
}

Points Points::FromDouble(double value) {
  return FromTenths(static_cast<std::int64_t>(std::llround(value * 10.0)));
}

std::string Points::ToString() const {
  const std::int64_t mag = std::llabs(tenths_);
  std::string out = tenths_ < 0 ? "-" : "";
  out += std::to_string(mag / 10);
  out += '.';
  out += static_cast<char>('0' + mag % 10);
  return out;
}

std::string_view GameCode(GameKind kind) {
  switch (kind) {
    case GameKind::kPrisonersDilemma: return "PD";
    case GameKind::kTravelersDilemma: return "TD";
    case GameKind::kPublicGoods: return "PG";
    case GameKind::kTrustGame: return "TG";
  }
  return "??";
}

std::string_view GameDisplayName(GameKind kind) {
  switch (kind) {
    case GameKind::kPrisonersDilemma: return "Prisoner's Dilemma";
    case GameKind::kTravelersDilemma: return "Traveler's Dilemma";
    case GameKind::kPublicGoods: return "Public Goods Game";
    case GameKind::kTrustGame: return "Trust Game";
  }
  return "?";
}

GameKind ParseGameCode(std::string_view code) {
  std::string upper(code);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (GameKind k : AllGames()) {
    if (GameCode(k) == upper) return k;
  }
  throw Error(ErrorCode::kConfigError, "unknown game '" + std::string(code) + "'");
}

bool GameSpec::IsValid(Action a) const {
  return std::find(valid_actions.begin(), valid_actions.end(), a) != valid_actions.end();
}

namespace {

GameSpec MakeGame(GameKind kind) {
  GameSpec g{.kind = kind, .n_players = 2, .valid_actions = {Action::kA0, Action::kA1},
             .cooperative_action = Action::kA0, .pd = {}, .td = {}, .pg = {}, .tg = {}};
  switch (kind) {
    case GameKind::kTravelersDilemma:
      g.valid_actions = {Action::kA0, Action::kA1, Action::kA2, Action::kA3};
      g.cooperative_action = Action::kA3;
      break;
    case GameKind::kPublicGoods:
      g.n_players = 3;
      break;
    default:
      break;
  }
  return g;
}

void CheckJoint(const GameSpec& game, std::span<const Action> joint) {
  if (static_cast<int>(joint.size()) != game.n_players) {
    throw Error(ErrorCode::kArityError, std::string(GameCode(game.kind)) + " expects " +
                                            std::to_string(game.n_players) + " actions, got " +
                                            std::to_string(joint.size()));
  }
  for (Action a : joint) {
    if (!game.IsValid(a)) {
      throw Error(ErrorCode::kInvalidAction, std::string(ActionLabel(a)) + " is not valid in " +
                                                 std::string(GameCode(game.kind)));
    }
  }
}

std::vector<Points> PrisonersDilemmaPayoff(const PrisonersDilemmaParams& p, Action a, Action b) {
  const bool ca = a == Action::kA0;
  const bool cb = b == Action::kA0;
  if (ca && cb) return {p.reward, p.reward};
  if (!ca && !cb) return {p.punishment, p.punishment};
  if (ca) return {p.sucker, p.temptation};
  return {p.temptation, p.sucker};
}

std::vector<Points> TravelersDilemmaPayoff(const TravelersDilemmaParams& p, Action a, Action b) {
  const Points ca = p.claims[static_cast<int>(a)];
  const Points cb = p.claims[static_cast<int>(b)];
  if (ca == cb) return {ca, cb};
  const Points low = std::min(ca, cb);
  const Points low_gets = low + p.adjustment;
  const Points high_gets = low - p.adjustment;
  return ca < cb ? std::vector<Points>{low_gets, high_gets}
                 : std::vector<Points>{high_gets, low_gets};
}

std::vector<Points> PublicGoodsPayoff(const PublicGoodsParams& p, std::span<const Action> joint) {
  const std::int64_t n = static_cast<std::int64_t>(joint.size());
  const std::int64_t k = std::count(joint.begin(), joint.end(), Action::kA0);
  // share = endowment * multiplier * k / n, carried in tenths:
  // (e/10) * (m/10) * k / n = e*m*k / (100 n) units = e*m*k / (10 n) tenths.
  const std::int64_t numerator = p.endowment.tenths() * p.multiplier.tenths() * k;
  const Points share = Points::FromTenths(numerator / (10 * n));
  std::vector<Points> out;
  out.reserve(joint.size());
  for (Action a : joint) out.push_back(a == Action::kA0 ? share : p.endowment + share);
  return out;
}

std::vector<Points> TrustGamePayoff(const TrustGameParams& p, Action a, Action b) {
  // Each player's payoff comes from their own focal table.
  auto focal = [&p](Action self, Action other) {
    const bool cs = self == Action::kA0;
    const bool co = other == Action::kA0;
    if (cs && co) return p.mutual_cooperation;
    if (!cs && !co) return p.mutual_defection;
    return cs ? p.sucker : p.temptation;
  };
  return {focal(a, b), focal(b, a)};
}

}  // namespace

const GameSpec& GetGame(GameKind kind) {
  static const GameSpec kGames[] = {
      MakeGame(GameKind::kPrisonersDilemma), MakeGame(GameKind::kTravelersDilemma),
      MakeGame(GameKind::kPublicGoods), MakeGame(GameKind::kTrustGame)};
  return kGames[static_cast<int>(kind)];
}

const std::vector<GameKind>& AllGames() {
  static const std::vector<GameKind> kAll = {
      GameKind::kPrisonersDilemma, GameKind::kTravelersDilemma, GameKind::kPublicGoods,
      GameKind::kTrustGame};
  return kAll;
}

std::vector<Points> Payoff(const GameSpec& game, std::span<const Action> joint) {
  CheckJoint(game, joint);
  switch (game.kind) {
    case GameKind::kPrisonersDilemma: return PrisonersDilemmaPayoff(game.pd, joint[0], joint[1]);
    case GameKind::kTravelersDilemma: return TravelersDilemmaPayoff(game.td, joint[0], joint[1]);
    case GameKind::kPublicGoods: return PublicGoodsPayoff(game.pg, joint);
    case GameKind::kTrustGame: return TrustGamePayoff(game.tg, joint[0], joint[1]);
  }
  return {};
}

bool IsCooperative(const GameSpec& game, Action a) {
  if (!game.IsValid(a)) {
    throw Error(ErrorCode::kInvalidAction,
                std::string(ActionLabel(a)) + " is not valid in " + std::string(GameCode(game.kind)));
  }
  return a == game.cooperative_action;
}

Action DefectAction(const GameSpec& game) {
  return game.kind == GameKind::kTravelersDilemma ? Action::kA0 : Action::kA1;
}

ReferenceProfiles GetReferenceProfiles(const GameSpec& game) {
  const auto n = static_cast<std::size_t>(game.n_players);
  return {JointAction(n, DefectAction(game)), JointAction(n, game.cooperative_action)};
}

std::vector<JointAction> EnumerateProfiles(const GameSpec& game) {
  std::vector<JointAction> out;
  const std::size_t m = game.valid_actions.size();
  std::size_t total = 1;
  for (int i = 0; i < game.n_players; ++i) total *= m;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    JointAction joint(static_cast<std::size_t>(game.n_players));
    std::size_t rest = code;
    for (int i = game.n_players - 1; i >= 0; --i) {
      joint[static_cast<std::size_t>(i)] = game.valid_actions[rest % m];
      rest /= m;
    }
    out.push_back(std::move(joint));
  }
  return out;
}

}  // namespace dilemma
