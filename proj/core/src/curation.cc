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

#include "dilemma/curation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <regex>
#include <span>
#include <thread>

#include "assets.h"
#include "dilemma/error.h"
#include "dilemma/rng.h"
#include "json.hpp"

namespace dilemma {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

bool IsContinuationByte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

std::string JoinTerms(const Lexicon& lex) {
  std::string out;
  for (const LexiconTerm& t : lex.terms()) {
    if (!out.empty()) out += ", ";
    for (std::size_t i = 0; i < t.words.size(); ++i) out += (i ? " " : "") + t.words[i];
    if (t.kind == TermKind::kPrefixStem) out += '*';
  }
  return out;
}

std::string Fill(std::string_view tmpl, std::string_view key, std::string_view value) {
  std::string out(tmpl);
  const std::string marker = "{" + std::string(key) + "}";
  const auto pos = out.find(marker);
  if (pos != std::string::npos) out.replace(pos, marker.size(), value);
  return out;
}

std::string_view SplitName(Split s) { return s == Split::kTrain ? "train" : "val"; }

}  // namespace

std::string FamilyKey(std::string_view response, std::size_t chars) {
  std::size_t i = 0;
  std::size_t seen = 0;
  while (i < response.size() && seen < chars) {
    ++i;
    while (i < response.size() && IsContinuationByte(response[i])) ++i;
    ++seen;
  }
  return std::string(response.substr(0, i));
}

bool Prefilter(const CurationRecord& record, const Lexicon& forward) {
  return CountMatches(record.response, forward) >= 1;
}

JudgeScores ParseJudgeScores(std::string_view text) {
  const std::string s(text);
  auto in_range = [&s](int v) {
    if (v < 0 || v > 10) {
      throw Error(ErrorCode::kJudgeParseError, "judge score out of range in '" + s + "'");
    }
    return v;
  };
  auto labeled = [&s](const char* label) -> std::optional<int> {
    const std::regex re(std::string(label) + R"(\s*[:=]\s*(-?\d+))", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(s, m, re)) return std::nullopt;
    return std::stoi(m[1].str());
  };
  const auto f = labeled("s_fwd");
  const auto q = labeled("s_qual");
  const auto p = labeled("s_spec");
  if (f && q && p) return {in_range(*f), in_range(*q), in_range(*p)};

  const std::regex integer(R"(-?\d+)");
  std::vector<int> values;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), integer); it != std::sregex_iterator();
       ++it) {
    values.push_back(std::stoi(it->str()));
  }
  if (values.size() != 3) {
    throw Error(ErrorCode::kJudgeParseError, "expected three scores in '" + s + "'");
  }
  return {in_range(values[0]), in_range(values[1]), in_range(values[2])};
}

std::string BuildJudgePrompt(const CurationRecord& record, const LexiconSet& lex) {
  std::string out(assets::Get("judge_prompt"));
  out = Fill(out, "forward_terms", JoinTerms(lex.forward));
  out = Fill(out, "reactive_terms", JoinTerms(lex.history));
  out = Fill(out, "prompt", record.prompt);
  out = Fill(out, "response", record.response);
  return out;
}

JudgeScores Judge(const CurationRecord& record, ChatClient& client,
                  const std::string& judge_model) {
  CompletionRequest req;
  req.model_name = judge_model;
  req.messages.push_back({"user", BuildJudgePrompt(record)});
  req.max_tokens = 256;
  for (int attempt = 0;; ++attempt) {
    const std::string reply = client.JudgeComplete(req).content;
    try {
      return ParseJudgeScores(reply);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kJudgeParseError || attempt >= 1) throw;
    }
  }
}

bool ThresholdFilter(const std::optional<JudgeScores>& scores, JudgeThresholds t) {
  if (!scores) throw Error(ErrorCode::kMissingScores, "record has not been judged");
  return scores->fwd >= t.fwd && scores->qual >= t.qual && scores->spec >= t.spec;
}

bool AnticheatFilter(CurationRecord& record, const Lexicon& forward, const Lexicon& react) {
  record.n_fwd = CountMatches(record.response, forward);
  record.n_react = CountMatches(record.response, react);
  return record.n_fwd >= 1 && record.n_fwd > record.n_react;
}

double TrainingWeight(const JudgeScores& scores) {
  return static_cast<double>(scores.fwd * scores.spec) / 100.0;
}

std::vector<CurationRecord> CapFamilies(std::vector<CurationRecord> records, int cap,
                                        std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> families;
  for (std::size_t i = 0; i < records.size(); ++i) families[records[i].family_key].push_back(i);
  std::vector<bool> keep(records.size(), true);
  const auto limit = static_cast<std::size_t>(std::max(cap, 0));
  for (auto& [key, members] : families) {
    if (members.size() <= limit) continue;
    Rng rng(MixSeed(seed, StableHash(key)));
    // Partial Fisher-Yates: the first `limit` slots become the sample.
    for (std::size_t i = 0; i < limit; ++i) {
      const std::size_t j = i + rng.UniformIndex(members.size() - i);
      std::swap(members[i], members[j]);
    }
    for (std::size_t i = limit; i < members.size(); ++i) keep[members[i]] = false;
  }
  std::vector<CurationRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(std::move(records[i]));
  }
  return out;
}

void FamilySplit(std::vector<CurationRecord>& records, double train_frac, std::uint64_t seed) {
  std::map<std::string, std::size_t> sizes;
  for (const CurationRecord& r : records) ++sizes[r.family_key];
  if (sizes.size() < 2) {
    throw Error(ErrorCode::kSplitImpossible, "need at least two prefix families to split");
  }
  std::vector<std::pair<std::string, std::size_t>> order(sizes.begin(), sizes.end());
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformIndex(i + 1)]);
  }
  const double target = train_frac * static_cast<double>(records.size());
  std::size_t best_k = 1;
  double best_gap = INFINITY;
  std::size_t cumulative = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    cumulative += order[k - 1].second;
    const double gap = std::abs(static_cast<double>(cumulative) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  std::map<std::string, Split, std::less<>> side;
  for (std::size_t k = 0; k < order.size(); ++k) {
    side[order[k].first] = k < best_k ? Split::kTrain : Split::kVal;
  }
  for (CurationRecord& r : records) r.split = side.at(r.family_key);
}

std::string ExportTraining(const std::vector<CurationRecord>& records, ExportOptions opts) {
  std::string out;
  for (const CurationRecord& r : records) {
    if (!r.scores) throw Error(ErrorCode::kMissingScores, "record " + r.id + " has no scores");
    std::string_view prompt = r.prompt;
    if (opts.prompt_char_budget > 0 && prompt.size() > opts.prompt_char_budget) {
      std::size_t start = prompt.size() - opts.prompt_char_budget;
      while (start < prompt.size() && IsContinuationByte(prompt[start])) ++start;
      prompt.remove_prefix(start);
    }
    ordered_json j;
    j["prompt"] = prompt;
    j["response"] = r.response;
    j["weight"] = TrainingWeight(*r.scores);
    j["split"] = r.split ? ordered_json(SplitName(*r.split)) : ordered_json(nullptr);
    j["meta"] = {{"id", r.id}, {"source_model", r.source_model}, {"hl", r.hl}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string CurationRecordToJson(const CurationRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["source_model"] = r.source_model;
  j["hl"] = r.hl;
  j["prompt"] = r.prompt;
  j["response"] = r.response;
  if (r.scores) {
    j["scores"] = {{"s_fwd", r.scores->fwd}, {"s_qual", r.scores->qual},
                   {"s_spec", r.scores->spec}};
  }
  return j.dump();
}

CurationRecord CurationRecordFromJson(std::string_view line) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kConfigError, "curation record is not a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "source_model" && key != "hl" && key != "prompt" &&
        key != "response" && key != "scores") {
      throw Error(ErrorCode::kConfigError, "unknown key '" + key + "' in curation record");
    }
  }
  CurationRecord r;
  try {
    r.id = j.value("id", "");
    r.source_model = j.value("source_model", "");
    r.hl = j.value("hl", 0);
    r.prompt = j.value("prompt", "");
    r.response = j.at("response").get<std::string>();
    if (j.contains("scores") && !j["scores"].is_null()) {
      const json& s = j["scores"];
      JudgeScores scores{s.at("s_fwd").get<int>(), s.at("s_qual").get<int>(),
                         s.at("s_spec").get<int>()};
      for (int v : {scores.fwd, scores.qual, scores.spec}) {
        if (v < 0 || v > 10) throw Error(ErrorCode::kConfigError, "score outside [0, 10]");
      }
      r.scores = scores;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed curation record: ") + e.what());
  }
  r.family_key = FamilyKey(r.response);
  return r;
}

std::vector<CurationRecord> RecordsFromRunLog(const RunLog& log) {
  std::vector<CurationRecord> out;
  const GameSpec& game = GetGame(log.config.game);
  for (const RoundRecord& r : log.records) {
    for (std::size_t seat = 0; seat < r.traces.size(); ++seat) {
      if (!r.traces[seat]) continue;
      const int s = static_cast<int>(seat);
      const std::span<const RoundRecord> before(log.records.data(),
                                                static_cast<std::size_t>(r.round - 1));
      const Observation obs = ObservationFor(log.config, before, s, r.round);
      CurationRecord rec;
      rec.id = log.meta.run_id + ":" + std::to_string(r.round) + ":P" + std::to_string(seat + 1);
      const AgentBinding& b = log.config.bindings[seat];
      rec.source_model = b.is_llm() ? std::get<LlmSpec>(b.kind).model_name : b.Label();
      rec.hl = obs.hl_declared;
      rec.prompt = BuildPrompt(obs, FormatHistory(obs.window, s, game));
      rec.response = *r.traces[seat];
      rec.family_key = FamilyKey(rec.response);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

CurationResult RunCuration(std::vector<CurationRecord> records, const CurationOptions& opts) {
  CurationResult result;
  auto stage = [&result](const char* name, std::size_t n) { result.retention.push_back({name, n}); };
  for (CurationRecord& r : records) {
    if (r.family_key.empty()) r.family_key = FamilyKey(r.response);
  }
  stage("input", records.size());

  std::erase_if(records, [](const CurationRecord& r) { return !Prefilter(r); });
  stage("prefilter", records.size());

  std::vector<std::size_t> unjudged;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].scores) unjudged.push_back(i);
  }
  if (!unjudged.empty()) {
    if (opts.judge_client == nullptr) {
      throw Error(ErrorCode::kMissingScores,
                  std::to_string(unjudged.size()) + " records lack scores and no judge is set");
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr transport_failure;
    std::vector<bool> rejected(records.size(), false);
    auto work = [&] {
      for (std::size_t k = next++; k < unjudged.size(); k = next++) {
        CurationRecord& r = records[unjudged[k]];
        try {
          r.scores = Judge(r, *opts.judge_client, opts.judge_model);
        } catch (const Error& e) {
          std::lock_guard lock(mu);
          if (e.code() == ErrorCode::kJudgeParseError) {
            rejected[unjudged[k]] = true;
          } else if (!transport_failure) {
            transport_failure = std::current_exception();
          }
        }
      }
    };
    {
      std::vector<std::jthread> workers;
      for (int w = 0; w < std::max(1, opts.judge_parallelism); ++w) workers.emplace_back(work);
    }
    if (transport_failure) std::rethrow_exception(transport_failure);
    std::size_t i = 0;
    std::erase_if(records, [&](const CurationRecord&) { return rejected[i++]; });
  }
  stage("judge", records.size());

  std::erase_if(records, [&opts](const CurationRecord& r) {
    return !ThresholdFilter(r.scores, opts.thresholds);
  });
  stage("threshold", records.size());

  std::erase_if(records, [](CurationRecord& r) { return !AnticheatFilter(r); });
  stage("anticheat", records.size());

  records = CapFamilies(std::move(records), opts.family_cap, opts.seed);
  stage("family_cap", records.size());

  FamilySplit(records, opts.train_frac, opts.seed);
  std::size_t train = 0;
  for (CurationRecord& r : records) {
    r.weight = TrainingWeight(*r.scores);
    train += r.split == Split::kTrain ? 1 : 0;
  }
  stage("train", train);
  stage("val", records.size() - train);
  result.records = std::move(records);
  return result;
}

std::string RetentionReportCsv(const std::vector<StageCount>& retention) {
  std::string out = "stage,count\n";
  for (const StageCount& s : retention) out += s.stage + "," + std::to_string(s.count) + "\n";
  return out;
}

}  // namespace dilemma
