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

#ifndef DILEMMA_MEMORY_H_
#define DILEMMA_MEMORY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dilemma/games.h"

namespace dilemma {

// One resolved round of a match. Player vectors are indexed 0..n-1; the
// text formats label them P1..Pn.
struct RoundRecord {
  int round = 0;  // 1-based
  JointAction actions;
  std::vector<Points> payoffs;
  std::vector<std::optional<std::string>> traces;
  std::vector<int> retries;
  // True where an agent's action came from the parse-failure fallback.
  std::vector<bool> fallback;

  bool operator==(const RoundRecord&) const = default;
};

struct HistoryEntry {
  int round = 0;
  JointAction actions;
  std::vector<Points> payoffs;
  bool synthetic = false;

  bool operator==(const HistoryEntry&) const = default;
};

// Oldest first; round indices strictly increasing.
struct HistoryWindow {
  std::vector<HistoryEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// The last min(hl, t-1) of rounds 1..t-1. `history` may hold more rounds
// than t-1; only the prefix is read.
HistoryWindow Window(std::span<const RoundRecord> history, int hl, int t);

// "R{n}: You=A0, P2=A1 → 2.0" for one entry, from `focal`'s seat.
std::string FormatHistoryLine(const HistoryEntry& entry, int focal);

// One line per entry joined by '\n' (no trailing newline); "" when empty.
std::string FormatHistory(const HistoryWindow& window, int focal, const GameSpec& game);

struct ParsedHistoryLine {
  int round = 0;
  JointAction actions;  // in player order
  Points focal_payoff;
};

// Inverse of FormatHistoryLine. Throws ParseFailure on malformed input.
ParsedHistoryLine ParseHistoryLine(std::string_view line, int n_players, int focal);

enum class SanitizeMode { kOff, kIdeal, kPolar };

std::string_view SanitizeModeName(SanitizeMode mode);
SanitizeMode ParseSanitizeMode(std::string_view name);

struct SanitizationConfig {
  SanitizeMode mode = SanitizeMode::kOff;
  int x_real = 0;   // most recent real rounds kept
  int window = 80;  // fixed displayed length

  // Throws ConfigError unless 0 <= x_real <= window.
  void Validate() const;
  bool operator==(const SanitizationConfig&) const = default;
};

// Sanitized view of rounds 1..t-1. Active only once t > cfg.window; before
// that the raw window of length cfg.window is returned. When active the
// result has exactly cfg.window entries labelled t-window..t-1: the newest
// x_real are real, the rest synthetic (IDEAL: the all-cooperate profile;
// POLAR: joint actions resampled from every real round so far and
// polarized). Deterministic in `seed`.
HistoryWindow Sanitize(std::span<const RoundRecord> history, const SanitizationConfig& cfg,
                       const GameSpec& game, int t, std::uint64_t seed);

// Traveler's Dilemma only: A0,A1 -> A0 and A2,A3 -> A3.
Action PolarRecode(const GameSpec& game, Action a);

}  // namespace dilemma

#endif  // DILEMMA_MEMORY_H_
