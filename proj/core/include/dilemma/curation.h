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

#ifndef DILEMMA_CURATION_H_
#define DILEMMA_CURATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dilemma/engine.h"
#include "dilemma/lexalysis.h"
#include "dilemma/llm_client.h"

namespace dilemma {

// Judge scores, each an integer in [0, 10].
struct JudgeScores {
  int fwd = 0;   // forward-looking density
  int qual = 0;  // logical coherence
  int spec = 0;  // history specificity

  bool operator==(const JudgeScores&) const = default;
};

enum class Split { kTrain, kVal };

struct CurationRecord {
  std::string id;
  std::string source_model;
  int hl = 0;
  std::string prompt;
  std::string response;
  std::optional<JudgeScores> scores;
  int n_fwd = 0;
  int n_react = 0;
  std::string family_key;
  std::optional<double> weight;
  std::optional<Split> split;
};

constexpr std::size_t kFamilyPrefixChars = 50;

// The first `chars` UTF-8 code points of `response`.
std::string FamilyKey(std::string_view response, std::size_t chars = kFamilyPrefixChars);

// True iff the response contains at least one forward-looking term.
bool Prefilter(const CurationRecord& record,
               const Lexicon& forward = LexiconSet::Pinned().forward);

// Accepts "s_fwd: 10, s_qual: 9, s_spec: 8" anywhere in the text, or else
// exactly three bare integers ("9 9 7"). Throws JudgeParseError otherwise
// or when a score lies outside [0, 10].
JudgeScores ParseJudgeScores(std::string_view text);

std::string BuildJudgePrompt(const CurationRecord& record,
                             const LexiconSet& lex = LexiconSet::Pinned());

// One judge call at temperature 0, re-asked once if the reply does not
// parse. Throws JudgeParseError after the second failure.
JudgeScores Judge(const CurationRecord& record, ChatClient& client,
                  const std::string& judge_model);

struct JudgeThresholds {
  int fwd = 9;
  int qual = 9;
  int spec = 7;
};

// Throws MissingScores when the record has not been judged.
bool ThresholdFilter(const std::optional<JudgeScores>& scores, JudgeThresholds t = {});

// Fills record.n_fwd / n_react and passes iff n_fwd >= 1 and n_fwd > n_react.
bool AnticheatFilter(CurationRecord& record, const Lexicon& forward = LexiconSet::Pinned().forward,
                     const Lexicon& react = LexiconSet::Pinned().history);

// fwd * spec / 100.
double TrainingWeight(const JudgeScores& scores);

// Keeps at most `cap` members of each prefix family, sampled uniformly
// with `seed`. Survivors keep their input order.
std::vector<CurationRecord> CapFamilies(std::vector<CurationRecord> records, int cap,
                                        std::uint64_t seed);

// Assigns record.split so that whole families land on one side and the
// train share of records is as close to train_frac as family sizes allow.
// Throws SplitImpossible with fewer than two families.
void FamilySplit(std::vector<CurationRecord>& records, double train_frac, std::uint64_t seed);

struct ExportOptions {
  // Keep only the last N characters of each prompt; 0 disables.
  std::size_t prompt_char_budget = 0;
};

// One JSON object per record: {prompt, response, weight, split, meta}.
// Throws MissingScores for unjudged records.
std::string ExportTraining(const std::vector<CurationRecord>& records, ExportOptions opts = {});

std::string CurationRecordToJson(const CurationRecord& record);
CurationRecord CurationRecordFromJson(std::string_view line);

// One record per reasoning trace in the log. Prompts are rebuilt from the
// log's config, which reproduces what the agent was sent.
std::vector<CurationRecord> RecordsFromRunLog(const RunLog& log);

struct StageCount {
  std::string stage;
  std::size_t count = 0;
};

struct CurationOptions {
  JudgeThresholds thresholds;
  int family_cap = 3;
  double train_frac = 0.95;
  std::uint64_t seed = 0;
  // Needed only for records that arrive without scores.
  ChatClient* judge_client = nullptr;
  std::string judge_model;
  int judge_parallelism = 4;
};

struct CurationResult {
  std::vector<CurationRecord> records;  // survivors, with weight and split
  std::vector<StageCount> retention;
};

// prefilter -> judge -> thresholds -> anti-cheat -> family cap -> split.
// Action labels are never consulted.
CurationResult RunCuration(std::vector<CurationRecord> records, const CurationOptions& opts);

// "stage,count" rows.
std::string RetentionReportCsv(const std::vector<StageCount>& retention);

}  // namespace dilemma

#endif  // DILEMMA_CURATION_H_
