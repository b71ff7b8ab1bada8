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

#ifndef DILEMMA_LEXALYSIS_H_
#define DILEMMA_LEXALYSIS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dilemma/engine.h"

namespace dilemma {

enum class TermKind { kExactToken, kPrefixStem, kPhrase };

struct LexiconTerm {
  std::vector<std::string> words;  // normalized: lowercase, hyphens split
  TermKind kind = TermKind::kExactToken;
};

// A named dictionary. Terms are given as written ("long-term",
// "mutual cooperat*"); a trailing '*' marks a prefix stem. Terms are
// lowercased, hyphen-normalized and deduplicated on construction.
class Lexicon {
 public:
  Lexicon(std::string name, const std::vector<std::string>& raw_terms, bool pinned = false);

  const std::string& name() const { return name_; }
  const std::vector<LexiconTerm>& terms() const { return terms_; }
  // True for the dictionaries shipped with the library.
  bool pinned() const { return pinned_; }

 private:
  std::string name_;
  std::vector<LexiconTerm> terms_;
  bool pinned_;
};

struct LexiconSet {
  Lexicon forward;
  Lexicon history;
  Lexicon paranoia;
  Lexicon cooperation;
  Lexicon defection;

  // The dictionaries compiled into the library.
  static const LexiconSet& Pinned();
  // Parses the "[section]" text format of core/assets/lexicons.txt. All
  // five sections must be present. User dictionaries stay non-pinned.
  static LexiconSet Parse(std::string_view text, bool pinned = false);
};

// Lowercased tokens with hyphens treated as separators.
std::vector<std::string> Tokenize(std::string_view text);

// Whitespace-separated tokens of the untransformed text.
int WordCount(std::string_view text);

// Left-to-right, longest-match-first count of lexicon hits; each token
// position contributes at most one hit.
int CountMatches(std::string_view text, const Lexicon& lexicon);

std::optional<double> Per1000(int count, int word_count);
std::optional<double> ForwardRatio(int fwd, int react);
std::optional<double> ParanoiaRatio(int paranoia, int coop);
bool MentionsDefection(std::string_view text,
                       const Lexicon& lexicon = LexiconSet::Pinned().defection);

struct TraceStats {
  int word_count = 0;
  int fwd = 0;
  int react = 0;
  int paranoia = 0;
  int coop = 0;
  std::optional<double> fwd_ratio;
  std::optional<double> paranoia_ratio;
  bool mentions_defection = false;
};

TraceStats AnalyzeTrace(std::string_view text, const LexiconSet& lex = LexiconSet::Pinned());

struct TraceRecordStats {
  int round = 0;
  int seat = 0;
  TraceStats stats;
};

struct RunLexicalSummary {
  std::vector<TraceRecordStats> traces;
  // Counts summed over traces; ratios are taken of the sums.
  TraceStats total;
  int trace_count = 0;
  double defect_mention_rate = 0.0;
};

// Throws NoTraces when the log carries no reasoning traces.
RunLexicalSummary AnalyzeRun(const RunLog& log, const LexiconSet& lex = LexiconSet::Pinned());

}  // namespace dilemma

#endif  // DILEMMA_LEXALYSIS_H_
