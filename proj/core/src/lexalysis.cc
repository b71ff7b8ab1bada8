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

#include "dilemma/lexalysis.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "assets.h"
#include "dilemma/error.h"

namespace dilemma {

namespace {

bool IsTokenChar(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c >= 0x80;
}

std::vector<std::string> SplitWords(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool TermMatchesAt(const LexiconTerm& term, const std::vector<std::string>& tokens,
                   std::size_t i) {
  const std::size_t len = term.words.size();
  if (i + len > tokens.size()) return false;
  for (std::size_t k = 0; k + 1 < len; ++k) {
    if (tokens[i + k] != term.words[k]) return false;
  }
  const std::string& last = tokens[i + len - 1];
  const std::string& want = term.words.back();
  if (term.kind == TermKind::kPrefixStem) return last.compare(0, want.size(), want) == 0;
  return last == want;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsTokenChar(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

int WordCount(std::string_view text) { return static_cast<int>(SplitWords(text).size()); }

Lexicon::Lexicon(std::string name, const std::vector<std::string>& raw_terms, bool pinned)
    : name_(std::move(name)), pinned_(pinned) {
  for (const std::string& raw : raw_terms) {
    std::string_view body = raw;
    const bool stem = !body.empty() && body.back() == '*';
    if (stem) body.remove_suffix(1);
    LexiconTerm term;
    term.words = Tokenize(body);
    if (term.words.empty()) continue;
    term.kind = stem ? TermKind::kPrefixStem
                     : (term.words.size() > 1 ? TermKind::kPhrase : TermKind::kExactToken);
    const bool dup = std::any_of(terms_.begin(), terms_.end(), [&term](const LexiconTerm& t) {
      return t.words == term.words && t.kind == term.kind;
    });
    if (!dup) terms_.push_back(std::move(term));
  }
  if (terms_.empty()) {
    throw Error(ErrorCode::kConfigError, "lexicon '" + name_ + "' has no terms");
  }
}

const LexiconSet& LexiconSet::Pinned() {
  static const LexiconSet kPinned = Parse(assets::Get("lexicons"), /*pinned=*/true);
  return kPinned;
}

LexiconSet LexiconSet::Parse(std::string_view text, bool pinned) {
  std::map<std::string, std::vector<std::string>, std::less<>> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string entry = line.substr(first, last - first + 1);
    if (entry.front() == '[' && entry.back() == ']') {
      current = entry.substr(1, entry.size() - 2);
      sections[current];
      continue;
    }
    if (current.empty()) {
      throw Error(ErrorCode::kConfigError, "lexicon term outside a [section]: " + entry);
    }
    sections[current].push_back(entry);
  }
  auto take = [&sections, pinned](const char* name) {
    auto it = sections.find(name);
    if (it == sections.end()) {
      throw Error(ErrorCode::kConfigError, std::string("lexicon file lacks [") + name + "]");
    }
    return Lexicon(name, it->second, pinned);
  };
  return LexiconSet{take("forward"), take("history"), take("paranoia"), take("cooperation"),
                    take("defection")};
}

int CountMatches(std::string_view text, const Lexicon& lexicon) {
  const std::vector<std::string> tokens = Tokenize(text);
  int count = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best = 0;
    for (const LexiconTerm& term : lexicon.terms()) {
      if (term.words.size() > best && TermMatchesAt(term, tokens, i)) best = term.words.size();
    }
    if (best > 0) {
      ++count;
      i += best;
    } else {
      ++i;
    }
  }
  return count;
}

std::optional<double> Per1000(int count, int word_count) {
  if (word_count <= 0) return std::nullopt;
  return static_cast<double>(count) / static_cast<double>(word_count) * 1000.0;
}

std::optional<double> ForwardRatio(int fwd, int react) {
  if (fwd + react == 0) return std::nullopt;
  return static_cast<double>(fwd) / static_cast<double>(fwd + react);
}

std::optional<double> ParanoiaRatio(int paranoia, int coop) { return ForwardRatio(paranoia, coop); }

bool MentionsDefection(std::string_view text, const Lexicon& lexicon) {
  return CountMatches(text, lexicon) >= 1;
}

TraceStats AnalyzeTrace(std::string_view text, const LexiconSet& lex) {
  TraceStats s;
  s.word_count = WordCount(text);
  s.fwd = CountMatches(text, lex.forward);
  s.react = CountMatches(text, lex.history);
  s.paranoia = CountMatches(text, lex.paranoia);
  s.coop = CountMatches(text, lex.cooperation);
  s.fwd_ratio = ForwardRatio(s.fwd, s.react);
  s.paranoia_ratio = ParanoiaRatio(s.paranoia, s.coop);
  s.mentions_defection = MentionsDefection(text, lex.defection);
  return s;
}

RunLexicalSummary AnalyzeRun(const RunLog& log, const LexiconSet& lex) {
  RunLexicalSummary out;
  int mentions = 0;
  for (const RoundRecord& r : log.records) {
    for (std::size_t seat = 0; seat < r.traces.size(); ++seat) {
      if (!r.traces[seat]) continue;
      TraceRecordStats t{r.round, static_cast<int>(seat), AnalyzeTrace(*r.traces[seat], lex)};
      out.total.word_count += t.stats.word_count;
      out.total.fwd += t.stats.fwd;
      out.total.react += t.stats.react;
      out.total.paranoia += t.stats.paranoia;
      out.total.coop += t.stats.coop;
      mentions += t.stats.mentions_defection ? 1 : 0;
      out.traces.push_back(std::move(t));
    }
  }
  if (out.traces.empty()) throw Error(ErrorCode::kNoTraces, "run log carries no reasoning traces");
  out.trace_count = static_cast<int>(out.traces.size());
  out.total.fwd_ratio = ForwardRatio(out.total.fwd, out.total.react);
  out.total.paranoia_ratio = ParanoiaRatio(out.total.paranoia, out.total.coop);
  out.total.mentions_defection = mentions > 0;
  out.defect_mention_rate = static_cast<double>(mentions) / out.trace_count;
  return out;
}

}  // namespace dilemma
