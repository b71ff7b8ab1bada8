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

#ifndef DILEMMA_GAMES_H_
#define DILEMMA_GAMES_H_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dilemma {

enum class Action : std::uint8_t { kA0 = 0, kA1 = 1, kA2 = 2, kA3 = 3 };

std::string_view ActionLabel(Action a);
// Accepts exactly "A0".."A3"; throws InvalidAction otherwise.
Action ParseActionLabel(std::string_view label);

using JointAction = std::vector<Action>;

// Exact decimal payoff with one-decimal resolution, stored in tenths.
// All four games have payoffs on this grid, so game logic never rounds.
class Points {
 public:
  constexpr Points() = default;
  static constexpr Points FromTenths(std::int64_t tenths) {
    Points p;
    p.tenths_ = tenths;
    return p;
  }
  static constexpr Points Whole(std::int64_t value) { return FromTenths(value * 10); }
  // Rounds to the nearest tenth.
  static Points FromDouble(double value);

  constexpr std::int64_t tenths() const { return tenths_; }
  constexpr double value() const { return static_cast<double>(tenths_) / 10.0; }

  // "200.0", "-100.0", "0.5".
  std::string ToString() const;

  constexpr auto operator<=>(const Points&) const = default;
  constexpr Points operator+(Points o) const { return FromTenths(tenths_ + o.tenths_); }
  constexpr Points operator-(Points o) const { return FromTenths(tenths_ - o.tenths_); }

 private:
  std::int64_t tenths_ = 0;
};

enum class GameKind { kPrisonersDilemma, kTravelersDilemma, kPublicGoods, kTrustGame };

// "PD", "TD", "PG", "TG".
std::string_view GameCode(GameKind kind);
std::string_view GameDisplayName(GameKind kind);
// Accepts the two-letter codes case-insensitively; throws ConfigError.
GameKind ParseGameCode(std::string_view code);

struct PrisonersDilemmaParams {
  Points temptation = Points::Whole(300);
  Points reward = Points::Whole(200);
  Points punishment = Points::Whole(100);
  Points sucker = Points::Whole(-100);
};

struct TravelersDilemmaParams {
  // Claim paid for A0..A3.
  std::vector<Points> claims = {Points::Whole(2), Points::Whole(3), Points::Whole(4),
                                Points::Whole(5)};
  Points adjustment = Points::Whole(2);
};

struct PublicGoodsParams {
  Points endowment = Points::Whole(1);
  Points multiplier = Points::FromTenths(15);
};

struct TrustGameParams {
  Points mutual_cooperation = Points::Whole(10);
  Points mutual_defection = Points::Whole(4);
  Points temptation = Points::Whole(20);
  Points sucker = Points::Whole(2);
};

struct GameSpec {
  GameKind kind;
  int n_players;
  std::vector<Action> valid_actions;
  Action cooperative_action;
  PrisonersDilemmaParams pd;
  TravelersDilemmaParams td;
  PublicGoodsParams pg;
  TrustGameParams tg;

  bool IsValid(Action a) const;
};

// The four canonical games. References are to static storage.
const GameSpec& GetGame(GameKind kind);
const std::vector<GameKind>& AllGames();

// One payoff per player for a simultaneous joint action. Pure.
// Throws ArityError on wrong length and InvalidAction on a foreign label.
std::vector<Points> Payoff(const GameSpec& game, std::span<const Action> joint);

bool IsCooperative(const GameSpec& game, Action a);

// The action a player takes in the game's Nash profile; used as the
// "defect" move by scripted strategies and by the parse fallback.
Action DefectAction(const GameSpec& game);

struct ReferenceProfiles {
  JointAction nash;
  JointAction social_optimum;
};

ReferenceProfiles GetReferenceProfiles(const GameSpec& game);

// Every joint action in lexicographic order (player 1 slowest).
std::vector<JointAction> EnumerateProfiles(const GameSpec& game);

}  // namespace dilemma

#endif  // DILEMMA_GAMES_H_
