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

#ifndef DILEMMA_METRICS_H_
#define DILEMMA_METRICS_H_

#include <span>
#include <vector>

#include "dilemma/engine.h"

namespace dilemma {

struct DiscountSpec {
  double delta = 0.99;

  void Validate() const;  // 0 < delta < 1
};

struct CooperationRates {
  double overall = 0.0;
  std::vector<double> per_player;
};

// Fractions of cooperative actions, per seat and over all player-actions.
// Throws EmptyRun for a log without rounds.
CooperationRates CooperationRate(const RunLog& log);

// sum_t delta^(t-1) R_t / sum_t delta^(t-1). Exact for constant streams.
double DiscountedReward(std::span<const double> payoffs, DiscountSpec discount = {});

// Arithmetic mean per round.
double MeanReward(std::span<const double> payoffs);

// The seat's payoff stream, one value per round.
std::vector<double> PayoffStream(const RunLog& log, int seat);

// Fraction of seats playing the cooperative action, per round.
std::vector<double> RoundCooperation(const RunLog& log);

enum class StdKind { kSample, kPopulation };

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
  // Set when n == 1: the spread is reported as 0 by convention, not measured.
  bool single_value = false;
};

Aggregate AggregateValues(std::span<const double> values, StdKind kind = StdKind::kSample);

// Zero-memory runs are sequences of independent one-shot rounds, so their
// spread is taken over the per-round cooperation of every round of every
// log rather than across seeds.
Aggregate AggregatePerRound(std::span<const RunLog> logs, StdKind kind = StdKind::kSample);

struct RunSummary {
  double coop_rate_overall = 0.0;
  std::vector<double> coop_rate_per_player;
  std::vector<double> discounted_reward_per_player;
  std::vector<double> mean_reward_per_player;
  double group_welfare = 0.0;  // mean per-round total / n_players
};

RunSummary Summarize(const RunLog& log, DiscountSpec discount = {});

// Mean cooperation of seats in `group_a` minus that of `group_b`, in
// percentage points. Seats are 0-based. Throws InvalidGrouping when the
// groups overlap, are empty or name a seat outside the summary.
double AsymmetryDelta(const RunSummary& summary, std::span<const int> group_a,
                      std::span<const int> group_b);

}  // namespace dilemma

#endif  // DILEMMA_METRICS_H_
