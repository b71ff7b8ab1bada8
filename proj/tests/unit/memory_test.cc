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
#include <sstream>

#include "doctest.h"
#include "dilemma/engine.h"
#include "dilemma/error.h"
#include "dilemma/memory.h"
#include "test_support.h"

namespace dilemma {
namespace {

using A = Action;
using testing::ConstantHistory;
using testing::MakeRound;

std::vector<int> Rounds(const HistoryWindow& w) {
  std::vector<int> out;
  for (const auto& e : w.entries) out.push_back(e.round);
  return out;
}

std::vector<std::string> Lines(const std::string& block) {
  std::vector<std::string> out;
  std::istringstream in(block);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// 199 rounds of a noisy Trust Game match, so real rounds differ from the
// all-cooperate filler.
std::vector<RoundRecord> NoisyTrustHistory() { return testing::SanitizeGoldenHistory(); }

TEST_CASE("window examples") {
  const GameSpec& pd = GetGame(GameKind::kPrisonersDilemma);
  const auto h = ConstantHistory(pd, 10, {A::kA0, A::kA0});
  CHECK(Window(h, 0, 7).empty());
  CHECK(Rounds(Window(h, 2, 5)) == std::vector<int>{3, 4});
  CHECK(Rounds(Window(h, 80, 3)) == std::vector<int>{1, 2});
  CHECK(Window(h, 5, 1).empty());
}

TEST_CASE("window size is min(hl, t-1)") {
  const GameSpec& pd = GetGame(GameKind::kPrisonersDilemma);
  const auto h = ConstantHistory(pd, 120, {A::kA1, A::kA0});
  for (int hl : {0, 1, 2, 3, 5, 10, 20, 40, 80}) {
    for (int t = 1; t <= 121; t += 7) {
      const HistoryWindow w = Window(h, hl, t);
      CHECK(static_cast<int>(w.size()) == std::min(hl, t - 1));
      if (!w.empty()) CHECK(w.entries.back().round == t - 1);
    }
  }
}

TEST_CASE("window rejects histories shorter than t-1") {
  const GameSpec& pd = GetGame(GameKind::kPrisonersDilemma);
  const auto h = ConstantHistory(pd, 3, {A::kA0, A::kA0});
  try {
    Window(h, 2, 10);
    FAIL("expected InconsistentHistory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInconsistentHistory);
  }
}

TEST_CASE("format history examples") {
  const GameSpec& tg = GetGame(GameKind::kTrustGame);
  HistoryWindow w{{{1, {A::kA0, A::kA1}, Payoff(tg, std::vector<Action>{A::kA0, A::kA1}), false}}};
  CHECK(FormatHistory(w, 0, tg) == "R1: You=A0, P2=A1 \xE2\x86\x92 2.0");
  CHECK(FormatHistory(w, 1, tg) == "R1: You=A1, P1=A0 \xE2\x86\x92 20.0");

  const GameSpec& pg = GetGame(GameKind::kPublicGoods);
  const JointAction all_free = {A::kA1, A::kA1, A::kA1};
  HistoryWindow p{{{499, all_free, Payoff(pg, all_free), false}}};
  CHECK(FormatHistory(p, 0, pg) == "R499: You=A1, P2=A1, P3=A1 \xE2\x86\x92 1.0");

  CHECK(FormatHistory(HistoryWindow{}, 0, tg).empty());
}

TEST_CASE("format history has one line per entry and no trailing newline") {
  const GameSpec& pd = GetGame(GameKind::kPrisonersDilemma);
  const auto h = ConstantHistory(pd, 30, {A::kA0, A::kA1});
  const std::string block = FormatHistory(Window(h, 20, 31), 0, pd);
  CHECK(Lines(block).size() == 20);
  CHECK(block.back() != '\n');
  CHECK(Lines(block).front() == "R11: You=A0, P2=A1 \xE2\x86\x92 -100.0");
}

TEST_CASE("format history errors") {
  const GameSpec& pd = GetGame(GameKind::kPrisonersDilemma);
  const auto h = ConstantHistory(pd, 2, {A::kA0, A::kA0});
  try {
    FormatHistory(Window(h, 2, 3), 2, pd);
    FAIL("expected InvalidPlayer");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidPlayer);
  }
  HistoryWindow bad = Window(h, 2, 3);
  bad.entries[0].payoffs[0] = Points::Whole(300);
  try {
    FormatHistory(bad, 0, pd);
    FAIL("expected InconsistentHistory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInconsistentHistory);
  }
}

TEST_CASE("history lines parse back to the record") {
  for (GameKind g : AllGames()) {
    const GameSpec& game = GetGame(g);
    int round = 1;
    for (const JointAction& joint : EnumerateProfiles(game)) {
      const HistoryEntry e{round, joint, Payoff(game, joint), false};
      for (int focal = 0; focal < game.n_players; ++focal) {
        const ParsedHistoryLine p = ParseHistoryLine(FormatHistoryLine(e, focal), game.n_players, focal);
        CHECK(p.round == round);
        CHECK(p.actions == joint);
        CHECK(p.focal_payoff == e.payoffs[static_cast<std::size_t>(focal)]);
      }
      ++round;
    }
  }
  CHECK_THROWS_AS(ParseHistoryLine("round one", 2, 0), Error);
}

TEST_CASE("sanitize: X=2 at round 200 keeps two real rounds after 78 cooperative ones") {
  const GameSpec& tg = GetGame(GameKind::kTrustGame);
  const auto h = NoisyTrustHistory();
  const HistoryWindow w = Sanitize(h, {SanitizeMode::kIdeal, 2, 80}, tg, 200, 5);
  REQUIRE(w.size() == 80);
  CHECK(w.entries.front().round == 120);
  CHECK(w.entries.back().round == 199);
  const auto lines = Lines(FormatHistory(w, 0, tg));
  for (int i = 0; i < 78; ++i) {
    CHECK(lines[static_cast<std::size_t>(i)] ==
          "R" + std::to_string(120 + i) + ": You=A0, P2=A0 \xE2\x86\x92 10.0");
    CHECK(w.entries[static_cast<std::size_t>(i)].synthetic);
  }
  const auto real = Lines(FormatHistory(Window(h, 2, 200), 0, tg));
  CHECK(lines[78] == real[0]);
  CHECK(lines[79] == real[1]);
}

TEST_CASE("sanitize: X equal to the window recovers the plain window") {
  const GameSpec& tg = GetGame(GameKind::kTrustGame);
  const auto h = NoisyTrustHistory();
  for (SanitizeMode mode : {SanitizeMode::kIdeal, SanitizeMode::kOff}) {
    const HistoryWindow s = Sanitize(h, {mode, 80, 80}, tg, 200, 3);
    CHECK(FormatHistory(s, 0, tg) == FormatHistory(Window(h, 80, 200), 0, tg));
  }
}

TEST_CASE("sanitize is inactive until the window fills") {
  const GameSpec& tg = GetGame(GameKind::kTrustGame);
  const auto h = NoisyTrustHistory();
  const HistoryWindow s = Sanitize(h, {SanitizeMode::kIdeal, 2, 80}, tg, 60, 3);
  CHECK(Rounds(s) == Rounds(Window(h, 80, 60)));
  for (const auto& e : s.entries) CHECK_FALSE(e.synthetic);
}

TEST_CASE("sanitize golden files") {
  for (int x : {2, 40, 80}) {
    const std::string diff =
        testing::CompareGolden(testing::SanitizeGoldenName(x), testing::SanitizeGoldenBlock(x));
    CHECK_MESSAGE(diff.empty(), diff);
  }
}

TEST_CASE("ideal filler in the Traveler's Dilemma pays 5.0") {
  const GameSpec& td = GetGame(GameKind::kTravelersDilemma);
  const auto h = ConstantHistory(td, 100, {A::kA0, A::kA1});
  const HistoryWindow w = Sanitize(h, {SanitizeMode::kIdeal, 10, 80}, td, 101, 9);
  REQUIRE(w.size() == 80);
  CHECK(w.entries[0].actions == JointAction{A::kA3, A::kA3});
  CHECK(w.entries[0].payoffs[0] == Points::Whole(5));
  CHECK(FormatHistoryLine(w.entries[0], 0) == "R21: You=A3, P2=A3 \xE2\x86\x92 5.0");
}

TEST_CASE("polar filler resamples real rounds and recodes them") {
  const GameSpec& td = GetGame(GameKind::kTravelersDilemma);
  std::vector<RoundRecord> h;
  const JointAction profiles[] = {{A::kA1, A::kA2}, {A::kA2, A::kA2}, {A::kA0, A::kA1}};
  for (int t = 1; t <= 150; ++t) h.push_back(MakeRound(td, t, profiles[t % 3]));
  const SanitizationConfig cfg{SanitizeMode::kPolar, 5, 80};
  const HistoryWindow a = Sanitize(h, cfg, td, 151, 42);
  const HistoryWindow b = Sanitize(h, cfg, td, 151, 42);
  CHECK(FormatHistory(a, 0, td) == FormatHistory(b, 0, td));
  std::set<JointAction> seen;
  for (int i = 0; i < 75; ++i) {
    const auto& e = a.entries[static_cast<std::size_t>(i)];
    CHECK(e.synthetic);
    seen.insert(e.actions);
    for (Action x : e.actions) CHECK((x == A::kA0 || x == A::kA3));
  }
  // Every recoded profile that occurs in the real rounds.
  const std::set<JointAction> possible = {{A::kA0, A::kA3}, {A::kA3, A::kA3}, {A::kA0, A::kA0}};
  for (const auto& j : seen) CHECK(possible.count(j) == 1);
  CHECK(seen.size() == 3);
  CHECK(FormatHistory(Sanitize(h, cfg, td, 151, 43), 0, td) != FormatHistory(a, 0, td));
}

TEST_CASE("polar recoding") {
  const GameSpec& td = GetGame(GameKind::kTravelersDilemma);
  CHECK(PolarRecode(td, A::kA1) == A::kA0);
  CHECK(PolarRecode(td, A::kA2) == A::kA3);
  CHECK(PolarRecode(td, A::kA0) == A::kA0);
  CHECK(PolarRecode(td, A::kA3) == A::kA3);
  CHECK_THROWS_AS(PolarRecode(GetGame(GameKind::kPrisonersDilemma), A::kA0), Error);
}

TEST_CASE("sanitization config validation") {
  CHECK_THROWS_AS((SanitizationConfig{SanitizeMode::kIdeal, 81, 80}.Validate()), Error);
  CHECK_THROWS_AS((SanitizationConfig{SanitizeMode::kIdeal, -1, 80}.Validate()), Error);
  CHECK_NOTHROW((SanitizationConfig{SanitizeMode::kPolar, 0, 80}.Validate()));
  CHECK(ParseSanitizeMode("polar") == SanitizeMode::kPolar);
  CHECK(SanitizeModeName(SanitizeMode::kIdeal) == "ideal");
}

}  // namespace
}  // namespace dilemma
