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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "dilemma/curation.h"
#include "dilemma/error.h"
#include "json.hpp"
#include "test_support.h"

namespace dilemma {
namespace {

using testing::FamilyResponse;
using testing::ScriptedChatClient;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a dilemma::Error");
  return ErrorCode::kIoError;
}

CurationRecord WithResponse(std::string response) {
  CurationRecord r;
  r.id = "r";
  r.response = std::move(response);
  r.family_key = FamilyKey(r.response);
  return r;
}

// Records in `sizes.size()` families; family i has sizes[i] members.
std::vector<CurationRecord> Families(const std::vector<int>& sizes) {
  std::vector<CurationRecord> out;
  for (std::size_t f = 0; f < sizes.size(); ++f) {
    for (int m = 0; m < sizes[f]; ++m) {
      CurationRecord r = WithResponse(FamilyResponse(static_cast<int>(f), std::to_string(m)));
      r.id = std::to_string(f) + "." + std::to_string(m);
      r.scores = JudgeScores{9, 9, 7};
      out.push_back(std::move(r));
    }
  }
  return out;
}

void CheckNoStraddle(const std::vector<CurationRecord>& records) {
  std::map<std::string, std::set<Split>> sides;
  for (const CurationRecord& r : records) {
    REQUIRE(r.split.has_value());
    sides[r.family_key].insert(*r.split);
  }
  for (const auto& [key, s] : sides) CHECK(s.size() == 1);
}

TEST_CASE("family key") {
  CHECK(FamilyKey("short") == "short");
  const std::string long_text(80, 'x');
  CHECK(FamilyKey(long_text).size() == 50);
  // Code points, not bytes: 50 two-byte characters stay intact.
  std::string accented;
  for (int i = 0; i < 60; ++i) accented += "\xC3\xA9";
  CHECK(FamilyKey(accented).size() == 100);
  CHECK(FamilyKey("") == "");
}

TEST_CASE("prefilter") {
  CHECK(Prefilter(WithResponse("Think about the long-term.")));
  CHECK_FALSE(Prefilter(WithResponse("I take the money now.")));
  CHECK_FALSE(Prefilter(WithResponse("")));
}

TEST_CASE("judge score parsing") {
  CHECK(ParseJudgeScores("9 9 7") == JudgeScores{9, 9, 7});
  CHECK(ParseJudgeScores("Overall solid. s_fwd: 10, s_qual: 9, s_spec: 8. Done.") ==
        JudgeScores{10, 9, 8});
  CHECK(ParseJudgeScores("S_FWD=3 s_qual = 4 s_spec:5") == JudgeScores{3, 4, 5});
  CHECK(CodeOf([] { ParseJudgeScores("11 9 7"); }) == ErrorCode::kJudgeParseError);
  CHECK(CodeOf([] { ParseJudgeScores("9 9"); }) == ErrorCode::kJudgeParseError);
  CHECK(CodeOf([] { ParseJudgeScores("no numbers"); }) == ErrorCode::kJudgeParseError);
  CHECK(CodeOf([] { ParseJudgeScores("s_fwd: -1, s_qual: 9, s_spec: 8"); }) ==
        ErrorCode::kJudgeParseError);
}

TEST_CASE("judge calls") {
  CurationRecord r = WithResponse("The future matters.");
  r.prompt = "GAME PROMPT";
  {
    ScriptedChatClient client({"9 9 7"});
    CHECK(Judge(r, client, "judge-m") == JudgeScores{9, 9, 7});
    REQUIRE(client.calls() == 1);
    const CompletionRequest req = client.requests()[0];
    CHECK(req.temperature == 0.0);
    CHECK(req.model_name == "judge-m");
    const std::string& text = req.messages.at(0).content;
    CHECK(text.find("GAME PROMPT") != std::string::npos);
    CHECK(text.find("The future matters.") != std::string::npos);
    CHECK(text.find("future, long term, signal") != std::string::npos);
    CHECK(text.find("mutual cooperat*") != std::string::npos);
    CHECK(text.find('{') == std::string::npos);
  }
  {
    ScriptedChatClient client({"I refuse", "s_fwd: 10, s_qual: 9, s_spec: 8"});
    CHECK(Judge(r, client, "j") == JudgeScores{10, 9, 8});
    CHECK(client.calls() == 2);
  }
  {
    ScriptedChatClient client({"11 9 7"});
    CHECK(CodeOf([&] { Judge(r, client, "j"); }) == ErrorCode::kJudgeParseError);
    CHECK(client.calls() == 2);
  }
}

TEST_CASE("threshold filter") {
  CHECK(ThresholdFilter(JudgeScores{9, 9, 7}));
  CHECK_FALSE(ThresholdFilter(JudgeScores{10, 8, 9}));
  CHECK_FALSE(ThresholdFilter(JudgeScores{8, 10, 10}));
  CHECK_FALSE(ThresholdFilter(JudgeScores{9, 9, 6}));
  CHECK(CodeOf([] { ThresholdFilter(std::nullopt); }) == ErrorCode::kMissingScores);
}

TEST_CASE("anti-cheat filter") {
  CurationRecord two_one = WithResponse("The future and our reputation carry some risk.");
  CHECK(AnticheatFilter(two_one));
  CHECK(two_one.n_fwd == 2);
  CHECK(two_one.n_react == 1);

  CurationRecord tie = WithResponse("The future is a risk.");
  CHECK_FALSE(AnticheatFilter(tie));
  CHECK(tie.n_fwd == 1);
  CHECK(tie.n_react == 1);

  CurationRecord none = WithResponse("Nothing here.");
  CHECK_FALSE(AnticheatFilter(none));
  CHECK(none.n_fwd == 0);
}

TEST_CASE("training weight") {
  CHECK(std::abs(TrainingWeight({9, 0, 7}) - 0.63) < 1e-12);
  CHECK(TrainingWeight({10, 0, 10}) == 1.0);
  CHECK(TrainingWeight({9, 10, 0}) == 0.0);
  CHECK(TrainingWeight({0, 10, 9}) == 0.0);
}

TEST_CASE("family cap") {
  std::vector<CurationRecord> in = Families({5, 2, 1});
  std::vector<CurationRecord> out = CapFamilies(in, 3, 42);
  CHECK(out.size() == 6);
  std::map<std::string, int> sizes;
  for (const CurationRecord& r : out) ++sizes[r.family_key];
  CHECK(sizes[in[0].family_key] == 3);
  CHECK(sizes[in[5].family_key] == 2);
  CHECK(sizes[in[7].family_key] == 1);

  std::vector<CurationRecord> again = CapFamilies(in, 3, 42);
  REQUIRE(again.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(again[i].id == out[i].id);

  // Survivors keep input order.
  for (std::size_t i = 1; i < out.size(); ++i) {
    const auto pos = [&in](const std::string& id) {
      for (std::size_t k = 0; k < in.size(); ++k) {
        if (in[k].id == id) return k;
      }
      return in.size();
    };
    CHECK(pos(out[i - 1].id) < pos(out[i].id));
  }

  // Every member of a large family is reachable across seeds.
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    for (const CurationRecord& r : CapFamilies(in, 3, seed)) seen.insert(r.id);
  }
  CHECK(seen.size() == in.size());
}

TEST_CASE("family split") {
  std::vector<CurationRecord> records = Families({3, 1, 2, 1, 1, 3, 2, 1, 1, 1});
  FamilySplit(records, 0.8, 9);
  CheckNoStraddle(records);
  int train = 0;
  for (const CurationRecord& r : records) train += r.split == Split::kTrain ? 1 : 0;
  CHECK(train > 0);
  CHECK(train < static_cast<int>(records.size()));

  std::vector<CurationRecord> one = Families({4});
  CHECK(CodeOf([&] { FamilySplit(one, 0.95, 1); }) == ErrorCode::kSplitImpossible);
  std::vector<CurationRecord> empty;
  CHECK(CodeOf([&] { FamilySplit(empty, 0.95, 1); }) == ErrorCode::kSplitImpossible);
}

TEST_CASE("family split at corpus scale") {
  // 1843 records in families of 1..3 members.
  std::vector<int> sizes;
  int total = 0;
  for (int f = 0; total < 1843; ++f) {
    const int s = std::min(1 + (f * 7) % 3, 1843 - total);
    sizes.push_back(s);
    total += s;
  }
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::vector<CurationRecord> records = Families(sizes);
    FamilySplit(records, 0.95, seed);
    CheckNoStraddle(records);
    int train = 0;
    for (const CurationRecord& r : records) train += r.split == Split::kTrain ? 1 : 0;
    CHECK(std::abs(train - 1751) <= 3);
    CHECK(std::abs(static_cast<int>(records.size()) - train - 92) <= 3);
  }
}

TEST_CASE("export") {
  CurationRecord r = WithResponse("resp");
  r.id = "a:1:P1";
  r.source_model = "m";
  r.hl = 5;
  r.prompt = "0123456789";
  r.scores = JudgeScores{9, 9, 7};
  r.split = Split::kVal;
  const std::string line = ExportTraining({r});
  CHECK(line ==
        "{\"prompt\":\"0123456789\",\"response\":\"resp\",\"weight\":0.63,\"split\":\"val\","
        "\"meta\":{\"id\":\"a:1:P1\",\"source_model\":\"m\",\"hl\":5}}\n");
  const auto j = nlohmann::json::parse(ExportTraining({r}, {4}));
  CHECK(j["prompt"] == "6789");

  r.scores.reset();
  CHECK(CodeOf([&] { ExportTraining({r}); }) == ErrorCode::kMissingScores);
}

TEST_CASE("record JSON") {
  CurationRecord r = WithResponse("The future.");
  r.id = "x";
  r.source_model = "m";
  r.hl = 3;
  r.prompt = "p";
  r.scores = JudgeScores{1, 2, 3};
  CurationRecord back = CurationRecordFromJson(CurationRecordToJson(r));
  CHECK(back.id == "x");
  CHECK(back.hl == 3);
  CHECK(back.scores == r.scores);
  CHECK(back.family_key == "The future.");
  CHECK(CodeOf([] { CurationRecordFromJson(R"({"response":"a","extra":1})"); }) ==
        ErrorCode::kConfigError);
  CHECK(CodeOf([] { CurationRecordFromJson(R"({"id":"a"})"); }) == ErrorCode::kConfigError);
  CHECK(CodeOf([] {
          CurationRecordFromJson(R"({"response":"a","scores":{"s_fwd":11,"s_qual":1,"s_spec":1}})");
        }) == ErrorCode::kConfigError);
}

TEST_CASE("pipeline on the synthetic corpus") {
  CurationOptions opts;
  opts.seed = 5;
  CurationResult res = RunCuration(testing::SyntheticCurationCorpus(), opts);
  const std::vector<std::pair<std::string, std::size_t>> expected = {
      {"input", 200},    {"prefilter", 160},  {"judge", 160}, {"threshold", 130},
      {"anticheat", 110}, {"family_cap", 90}};
  REQUIRE(res.retention.size() == 8);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(res.retention[i].stage == expected[i].first);
    CHECK(res.retention[i].count == expected[i].second);
  }
  CHECK(res.retention[6].count + res.retention[7].count == 90);
  CHECK(res.records.size() == 90);
  CheckNoStraddle(res.records);
  std::map<std::string, int> sizes;
  for (const CurationRecord& r : res.records) {
    ++sizes[r.family_key];
    REQUIRE(r.weight.has_value());
    CHECK(std::abs(*r.weight - r.scores->fwd * r.scores->spec / 100.0) < 1e-12);
  }
  for (const auto& [key, n] : sizes) CHECK(n <= 3);
  CHECK(RetentionReportCsv(res.retention).rfind("stage,count\ninput,200\nprefilter,160\n", 0) ==
        0);
}

TEST_CASE("pipeline judges unscored records") {
  std::vector<CurationRecord> corpus = testing::SyntheticCurationCorpus();
  for (CurationRecord& r : corpus) r.scores.reset();
  CurationOptions opts;
  CHECK(CodeOf([&] { RunCuration(corpus, opts); }) == ErrorCode::kMissingScores);

  // Replies to families 0100-0199 never parse, so those records drop out.
  testing::FunctionChatClient judge([](const CompletionRequest& req) -> std::string {
    const std::string& text = req.messages.at(0).content;
    return text.find("Family 01") != std::string::npos ? "junk" : "10 9 8";
  });
  opts.judge_client = &judge;
  opts.judge_parallelism = 3;
  CurationResult res = RunCuration(corpus, opts);
  // Families 0-39 fail the prefilter, 40-69 had low planted scores (now
  // 10/9/8), 70-89 fail anti-cheat, 90-99 hold 5 members each and
  // 100-139 are the clean pairs and singletons the judge cannot score.
  const std::vector<std::size_t> counts = {200, 160, 100, 100, 80, 60};
  for (std::size_t i = 0; i < counts.size(); ++i) CHECK(res.retention[i].count == counts[i]);
}

}  // namespace
}  // namespace dilemma
