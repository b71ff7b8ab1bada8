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

#include <set>

#include "doctest.h"
#include "dilemma/error.h"
#include "dilemma/games.h"
#include "test_support.h"

namespace dilemma {
namespace {

using A = Action;

std::vector<double> Values(const std::vector<Points>& p) {
  std::vector<double> out;
  for (Points x : p) out.push_back(x.value());
  return out;
}

std::vector<double> PayoffOf(GameKind g, JointAction joint) {
  return Values(Payoff(GetGame(g), joint));
}

double Total(const GameSpec& game, const JointAction& joint) {
  double sum = 0;
  for (Points p : Payoff(game, joint)) sum += p.value();
  return sum;
}

TEST_CASE("payoff examples") {
  CHECK(PayoffOf(GameKind::kPrisonersDilemma, {A::kA0, A::kA0}) == std::vector<double>{200, 200});
  CHECK(PayoffOf(GameKind::kPrisonersDilemma, {A::kA1, A::kA0}) == std::vector<double>{300, -100});
  CHECK(PayoffOf(GameKind::kTravelersDilemma, {A::kA3, A::kA3}) == std::vector<double>{5, 5});
  CHECK(PayoffOf(GameKind::kTravelersDilemma, {A::kA1, A::kA3}) == std::vector<double>{5, 1});
  CHECK(PayoffOf(GameKind::kPublicGoods, {A::kA0, A::kA1, A::kA1}) ==
        std::vector<double>{0.5, 1.5, 1.5});
  CHECK(PayoffOf(GameKind::kPublicGoods, {A::kA0, A::kA0, A::kA0}) ==
        std::vector<double>{1.5, 1.5, 1.5});
  CHECK(PayoffOf(GameKind::kTrustGame, {A::kA0, A::kA0}) == std::vector<double>{10, 10});
  CHECK(PayoffOf(GameKind::kTrustGame, {A::kA1, A::kA1}) == std::vector<double>{4, 4});
  CHECK(PayoffOf(GameKind::kTrustGame, {A::kA1, A::kA0}) == std::vector<double>{20, 2});
}

TEST_CASE("payoffs match the hand-written oracle for every profile") {
  std::size_t rows = 0;
  for (GameKind g : AllGames()) {
    const GameSpec& game = GetGame(g);
    for (const JointAction& joint : EnumerateProfiles(game)) {
      bool found = false;
      for (const auto& row : testing::OraclePayoffTable()) {
        if (row.game != g || row.joint != joint) continue;
        found = true;
        CHECK(PayoffOf(g, joint) == row.payoffs);
      }
      CHECK(found);
      ++rows;
    }
  }
  CHECK(rows == 32);
  CHECK(testing::OraclePayoffTable().size() == 32);
}

TEST_CASE("payoff errors") {
  const GameSpec& pd = GetGame(GameKind::kPrisonersDilemma);
  const JointAction three = {A::kA0, A::kA0, A::kA0};
  const JointAction foreign = {A::kA2, A::kA0};
  CHECK_THROWS_AS(Payoff(pd, three), Error);
  try {
    Payoff(pd, three);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kArityError);
  }
  try {
    Payoff(pd, foreign);
    FAIL("expected InvalidAction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidAction);
  }
  CHECK_THROWS_AS(ParseActionLabel("A4"), Error);
  CHECK_THROWS_AS(ParseActionLabel("a0"), Error);
}

TEST_CASE("payoff is symmetric under seat permutation") {
  for (GameKind g : AllGames()) {
    const GameSpec& game = GetGame(g);
    for (const JointAction& joint : EnumerateProfiles(game)) {
      JointAction swapped = joint;
      std::swap(swapped[0], swapped[1]);
      const auto a = Payoff(game, joint);
      const auto b = Payoff(game, swapped);
      CHECK(a[0] == b[1]);
      CHECK(a[1] == b[0]);
    }
  }
}

TEST_CASE("cooperative labels") {
  CHECK(IsCooperative(GetGame(GameKind::kPrisonersDilemma), A::kA0));
  CHECK_FALSE(IsCooperative(GetGame(GameKind::kTravelersDilemma), A::kA2));
  CHECK(IsCooperative(GetGame(GameKind::kTravelersDilemma), A::kA3));
  CHECK_FALSE(IsCooperative(GetGame(GameKind::kTrustGame), A::kA1));
  CHECK(IsCooperative(GetGame(GameKind::kPublicGoods), A::kA0));
}

TEST_CASE("reference profiles") {
  using P = ReferenceProfiles;
  const P pd = GetReferenceProfiles(GetGame(GameKind::kPrisonersDilemma));
  CHECK(pd.nash == JointAction{A::kA1, A::kA1});
  CHECK(pd.social_optimum == JointAction{A::kA0, A::kA0});
  const P td = GetReferenceProfiles(GetGame(GameKind::kTravelersDilemma));
  CHECK(td.nash == JointAction{A::kA0, A::kA0});
  CHECK(td.social_optimum == JointAction{A::kA3, A::kA3});
  const P pg = GetReferenceProfiles(GetGame(GameKind::kPublicGoods));
  CHECK(pg.nash == JointAction{A::kA1, A::kA1, A::kA1});
  CHECK(pg.social_optimum == JointAction{A::kA0, A::kA0, A::kA0});
}

TEST_CASE("nash profiles survive unilateral deviations; optima maximize welfare") {
  for (GameKind g : AllGames()) {
    const GameSpec& game = GetGame(g);
    const ReferenceProfiles ref = GetReferenceProfiles(game);
    const auto base = Payoff(game, ref.nash);
    for (std::size_t seat = 0; seat < ref.nash.size(); ++seat) {
      for (Action dev : game.valid_actions) {
        JointAction d = ref.nash;
        d[seat] = dev;
        CHECK(Payoff(game, d)[seat] <= base[seat]);
      }
    }
    double best = -1e18;
    for (const JointAction& joint : EnumerateProfiles(game)) best = std::max(best, Total(game, joint));
    if (g == GameKind::kTrustGame) {
      // Under the per-player focal table a defector facing a cooperator
      // earns 20 + 2 = 22 in total, above mutual cooperation's 20.
      CHECK(Total(game, ref.social_optimum) == 20);
      CHECK(best == 22);
    } else {
      CHECK(Total(game, ref.social_optimum) == best);
    }
  }
}

TEST_CASE("trust game mutual cooperation is pareto optimal") {
  const GameSpec& tg = GetGame(GameKind::kTrustGame);
  const auto opt = Payoff(tg, GetReferenceProfiles(tg).social_optimum);
  for (const JointAction& joint : EnumerateProfiles(tg)) {
    const auto p = Payoff(tg, joint);
    const bool dominates = p[0] >= opt[0] && p[1] >= opt[1] && (p[0] > opt[0] || p[1] > opt[1]);
    CHECK_FALSE(dominates);
  }
}

TEST_CASE("enumeration is lexicographic and complete") {
  const auto td = EnumerateProfiles(GetGame(GameKind::kTravelersDilemma));
  REQUIRE(td.size() == 16);
  CHECK(td.front() == JointAction{A::kA0, A::kA0});
  CHECK(td[1] == JointAction{A::kA0, A::kA1});
  CHECK(td.back() == JointAction{A::kA3, A::kA3});
  CHECK(std::set<JointAction>(td.begin(), td.end()).size() == 16);
  CHECK(EnumerateProfiles(GetGame(GameKind::kPublicGoods)).size() == 8);
}

TEST_CASE("defect actions") {
  CHECK(DefectAction(GetGame(GameKind::kPrisonersDilemma)) == A::kA1);
  CHECK(DefectAction(GetGame(GameKind::kTravelersDilemma)) == A::kA0);
  CHECK(DefectAction(GetGame(GameKind::kPublicGoods)) == A::kA1);
  CHECK(DefectAction(GetGame(GameKind::kTrustGame)) == A::kA1);
}

TEST_CASE("points formatting and names") {
  CHECK(Points::Whole(200).ToString() == "200.0");
  CHECK(Points::Whole(-100).ToString() == "-100.0");
  CHECK(Points::FromTenths(5).ToString() == "0.5");
  CHECK(Points::FromTenths(-5).ToString() == "-0.5");
  CHECK(Points::FromDouble(1.5) == Points::FromTenths(15));
  CHECK(ParseGameCode("pd") == GameKind::kPrisonersDilemma);
  CHECK(ParseGameCode("TG") == GameKind::kTrustGame);
  CHECK_THROWS_AS(ParseGameCode("xx"), Error);
  CHECK(GameDisplayName(GameKind::kTravelersDilemma) == "Traveler's Dilemma");
}

}  // namespace
}  // namespace dilemma
