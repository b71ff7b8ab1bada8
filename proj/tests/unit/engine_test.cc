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

#include <atomic>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dilemma/engine.h"
#include "dilemma/error.h"
#include "test_support.h"

namespace dilemma {
namespace {

using A = Action;
using testing::ScriptedMatch;

// Remembers what it was shown; plays a fixed action.
class RecordingAgent : public Agent {
 public:
  explicit RecordingAgent(Action a) : action_(a) {}
  Decision Decide(const Observation& obs, std::string_view block) override {
    rounds.push_back(obs.round);
    window_sizes.push_back(static_cast<int>(obs.window.size()));
    if (!obs.window.empty()) last_seen.push_back(obs.window.entries.back().round);
    blocks.emplace_back(block);
    return {action_, std::nullopt, std::nullopt, 0, false};
  }
  std::vector<int> rounds;
  std::vector<int> window_sizes;
  std::vector<int> last_seen;
  std::vector<std::string> blocks;

 private:
  Action action_;
};

MatchConfig LlmMatch(int rounds) {
  MatchConfig cfg;
  cfg.game = GameKind::kPrisonersDilemma;
  AgentBinding b;
  b.kind = LlmSpec{"stub", "default"};
  cfg.bindings = {b, b};
  cfg.hl = {2, 2};
  cfg.horizon = Horizon::Fixed(rounds);
  cfg.seed = 3;
  return cfg;
}

TEST_CASE("tit-for-tat self-play cooperates for all 500 rounds") {
  const RunLog log = RunMatch(ScriptedMatch(GameKind::kPrisonersDilemma,
                                            {Strategy::kTitForTat, Strategy::kTitForTat}, 1, 500));
  REQUIRE(log.records.size() == 500);
  for (const auto& r : log.records) CHECK(r.actions == JointAction{A::kA0, A::kA0});
  CHECK(log.termination.kind == Termination::Kind::kHorizonReached);
  CHECK(log.termination.round == 500);
}

TEST_CASE("grim trigger against all-defect") {
  const RunLog log = RunMatch(ScriptedMatch(GameKind::kPrisonersDilemma,
                                            {Strategy::kGrimTrigger, Strategy::kAllDefect}, 1, 500));
  REQUIRE(log.records.size() == 500);
  CHECK(log.records[0].actions == JointAction{A::kA0, A::kA1});
  for (std::size_t i = 1; i < 500; ++i) CHECK(log.records[i].actions == JointAction{A::kA1, A::kA1});
}

TEST_CASE("continuation") {
  Rng rng(1);
  CHECK_FALSE(Continuation(Horizon::Fixed(500), 500, rng));
  CHECK(Continuation(Horizon::Fixed(500), 1, rng));
  CHECK_FALSE(Continuation(Horizon::Geometric(0.99, 500), 500, rng));
}

TEST_CASE("geometric stopping matches the capped-geometric mean") {
  // E[min(G, 500)] with P(G > k) = 0.99^k, by direct summation.
  double expected = 0.0;
  for (int k = 0; k < 500; ++k) expected += std::pow(0.99, k);
  CHECK(expected == doctest::Approx(99.343).epsilon(1e-4));

  const Horizon h = Horizon::Geometric(0.99, 500);
  double total = 0.0;
  const int sims = 10000;
  for (int i = 0; i < sims; ++i) {
    Rng rng(MixSeed(2026, static_cast<std::uint64_t>(i)));
    int t = 1;
    while (Continuation(h, t, rng)) ++t;
    CHECK(t <= 500);
    total += t;
  }
  CHECK(std::abs(total / sims - expected) < 2.0);
}

TEST_CASE("geometric horizon is deterministic in the seed") {
  MatchConfig cfg = ScriptedMatch(GameKind::kTrustGame, {Strategy::kAllCoop, Strategy::kAllCoop}, 3, 500, 77);
  cfg.horizon = Horizon::Geometric(0.99, 500);
  const RunLog a = RunMatch(cfg);
  const RunLog b = RunMatch(cfg);
  CHECK(a.termination == b.termination);
  CHECK(a.records.size() == b.records.size());
  bool any_difference = false;
  for (std::uint64_t s = 1; s < 20 && !any_difference; ++s) {
    cfg.seed = 77 + s;
    any_difference = RunMatch(cfg).records.size() != a.records.size();
  }
  CHECK(any_difference);
}

TEST_CASE("agents see only rounds before the current one") {
  MatchConfig cfg = ScriptedMatch(GameKind::kPrisonersDilemma,
                                  {Strategy::kAllCoop, Strategy::kAllCoop}, 3, 10);
  std::vector<std::unique_ptr<Agent>> agents;
  agents.push_back(std::make_unique<RecordingAgent>(A::kA0));
  agents.push_back(std::make_unique<RecordingAgent>(A::kA1));
  const RunLog log = RunMatchWithAgents(cfg, agents);
  const auto& first = static_cast<RecordingAgent&>(*agents[0]);
  CHECK(first.window_sizes == std::vector<int>{0, 1, 2, 3, 3, 3, 3, 3, 3, 3});
  CHECK(first.last_seen == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(first.blocks[1] == "R1: You=A0, P2=A1 \xE2\x86\x92 -100.0");
  const auto& second = static_cast<RecordingAgent&>(*agents[1]);
  CHECK(second.blocks[1] == "R1: You=A1, P1=A0 \xE2\x86\x92 300.0");
}

TEST_CASE("concurrent seats give the same log as sequential ones") {
  const MatchConfig cfg = ScriptedMatch(GameKind::kPublicGoods,
      {Strategy::kRandomCoop, Strategy::kTitForTat, Strategy::kGrimTrigger}, 5, 300, 12);
  auto make = [&cfg] {
    std::vector<std::unique_ptr<Agent>> agents;
    for (std::size_t i = 0; i < cfg.bindings.size(); ++i) {
      agents.push_back(MakeAgent(cfg.bindings[i], static_cast<int>(i), cfg.seed, nullptr));
    }
    return agents;
  };
  const auto a = make();
  const auto b = make();
  CHECK(RunLogToJsonl(RunMatchWithAgents(cfg, a, false)) ==
        RunLogToJsonl(RunMatchWithAgents(cfg, b, true)));
}

TEST_CASE("prompt observer sees every seat every round") {
  const MatchConfig cfg = ScriptedMatch(GameKind::kPublicGoods,
      {Strategy::kAllCoop, Strategy::kAllCoop, Strategy::kAllCoop}, 2, 4);
  int calls = 0;
  RunMatch(cfg, nullptr, [&calls](const Observation& obs, std::string_view prompt) {
    ++calls;
    CHECK(prompt.find("This is round " + std::to_string(obs.round) + ".") != std::string_view::npos);
  });
  CHECK(calls == 12);
}

TEST_CASE("llm seats record traces and retries") {
  testing::ScriptedChatClient client({"Cooperation pays off.\nA0"});
  const RunLog log = RunMatch(LlmMatch(5), &client);
  REQUIRE(log.records.size() == 5);
  CHECK(client.calls() == 10);
  for (const auto& r : log.records) {
    REQUIRE(r.traces[0]);
    CHECK(*r.traces[0] == "Cooperation pays off.\nA0");
    CHECK(r.retries == std::vector<int>{0, 0});
  }
  try {
    ReplayVerify(log);
    FAIL("expected UnsupportedReplay");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedReplay);
  }
}

TEST_CASE("unparseable llm output aborts the match") {
  std::atomic<int> calls{0};
  testing::FunctionChatClient client([&calls](const CompletionRequest&) {
    return ++calls <= 6 ? std::string("A1") : std::string("no idea");
  });
  const RunLog log = RunMatch(LlmMatch(10), &client);
  CHECK(log.termination.kind == Termination::Kind::kAborted);
  CHECK(log.records.size() == 3);
  CHECK(log.termination.round == 3);
  CHECK_FALSE(log.termination.reason.empty());
}

TEST_CASE("replay verification") {
  const RunLog log = RunMatch(ScriptedMatch(GameKind::kTravelersDilemma,
                                            {Strategy::kRandomCoop, Strategy::kTitForTat}, 2, 120, 5));
  CHECK(ReplayVerify(log));
  RunLog tampered = log;
  tampered.records[36].payoffs[1] = tampered.records[36].payoffs[1] + Points::Whole(1);
  try {
    ReplayVerify(tampered);
    FAIL("expected ReplayDivergence");
  } catch (const ReplayDivergence& e) {
    CHECK(e.round() == 37);
    CHECK(e.code() == ErrorCode::kReplayDivergence);
  }
}

TEST_CASE("run logs round-trip through JSONL") {
  MatchConfig cfg = ScriptedMatch(GameKind::kTrustGame, {Strategy::kRandomCoop, Strategy::kGrimTrigger}, 80, 250, 9);
  cfg.sanitization = {SanitizationConfig{SanitizeMode::kIdeal, 10, 80},
                      SanitizationConfig{SanitizeMode::kOff, 0, 80}};
  RunLog log = RunMatch(cfg);
  log.meta = {"tg-x-hl80-reasoning-seed0", "x", 0};
  log.records[3].traces[0] = "a trace with \"quotes\"\nand lines";
  log.records[3].retries[1] = 2;
  log.records[3].fallback[1] = true;
  const std::string text = RunLogToJsonl(log);
  const RunLog back = RunLogFromJsonl(text);
  CHECK(back == log);
  CHECK(RunLogToJsonl(back) == text);

  std::istringstream in(text);
  std::string header;
  std::string round1;
  std::getline(in, header);
  std::getline(in, round1);
  CHECK(header.rfind(R"({"type":"header","schema_version":1,)", 0) == 0);
  CHECK(round1.find(R"("actions":{"P1":)") != std::string::npos);
  CHECK(round1.find(R"("traces":null)") != std::string::npos);
  const std::size_t last = text.rfind('\n', text.size() - 2);
  CHECK(text.compare(last + 1, 16, R"({"type":"footer")") == 0);
}

TEST_CASE("truncated or malformed logs are rejected") {
  const RunLog log = RunMatch(ScriptedMatch(GameKind::kPrisonersDilemma,
                                            {Strategy::kAllCoop, Strategy::kAllCoop}, 1, 3));
  std::string text = RunLogToJsonl(log);
  const std::string truncated = text.substr(0, text.rfind("{\"type\":\"footer\""));
  CHECK_THROWS_AS(RunLogFromJsonl(truncated), Error);
  CHECK_THROWS_AS(RunLogFromJsonl("{\"round\":1}\n"), Error);
  CHECK_THROWS_AS(RunLogFromJsonl(""), Error);
}

TEST_CASE("match config json") {
  const MatchConfig cfg = MatchConfigFromJson(
      R"({"game":"pg","bindings":["all_coop"],"hl":5,"horizon":{"kind":"fixed","rounds":20}})");
  CHECK(cfg.bindings.size() == 3);
  CHECK(cfg.hl == std::vector<int>{5, 5, 5});
  CHECK(cfg.horizon == Horizon::Fixed(20));
  CHECK(MatchConfigFromJson(MatchConfigToJson(cfg)) == cfg);
  CHECK_THROWS_AS(MatchConfigFromJson(R"({"game":"pd","bindings":["all_coop"],"hl":1,"colour":1})"),
                  Error);
  CHECK_THROWS_AS(MatchConfigFromJson(R"({"game":"pd","bindings":["all_coop","all_coop","all_coop"],"hl":1})"),
                  Error);
}

TEST_CASE("config validation") {
  MatchConfig cfg = ScriptedMatch(GameKind::kPrisonersDilemma, {Strategy::kAllCoop}, 1, 10);
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = ScriptedMatch(GameKind::kPrisonersDilemma, {Strategy::kAllCoop, Strategy::kAllCoop}, 1, 10);
  cfg.sanitization = {SanitizationConfig{SanitizeMode::kIdeal, 2, 80},
                      SanitizationConfig{SanitizeMode::kIdeal, 2, 80}};
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg.hl = {80, 80};
  CHECK_NOTHROW(cfg.Validate());
  cfg.horizon = Horizon::Fixed(0);
  CHECK_THROWS_AS(cfg.Validate(), Error);
}

}  // namespace
}  // namespace dilemma
