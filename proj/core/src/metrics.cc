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

#include "dilemma/metrics.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "dilemma/error.h"

namespace dilemma {

namespace {

void RequireRounds(const RunLog& log) {
  if (log.records.empty()) throw Error(ErrorCode::kEmptyRun, "run has no rounds");
}

void RequireValues(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::kEmptyRun, "payoff sequence is empty");
}

}  // namespace

void DiscountSpec::Validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kConfigError, "discount factor must lie in (0, 1)");
  }
}

CooperationRates CooperationRate(const RunLog& log) {
  RequireRounds(log);
  const GameSpec& game = GetGame(log.config.game);
  const auto n = static_cast<std::size_t>(game.n_players);
  std::vector<long> coop(n, 0);
  for (const RoundRecord& r : log.records) {
    for (std::size_t i = 0; i < n; ++i) coop[i] += IsCooperative(game, r.actions[i]) ? 1 : 0;
  }
  CooperationRates out;
  const auto rounds = static_cast<double>(log.records.size());
  long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.per_player.push_back(static_cast<double>(coop[i]) / rounds);
    total += coop[i];
  }
  out.overall = static_cast<double>(total) / (rounds * static_cast<double>(n));
  return out;
}

double DiscountedReward(std::span<const double> payoffs, DiscountSpec discount) {
  RequireValues(payoffs);
  discount.Validate();
  // Offsetting by the minimum makes constant streams come out exact and
  // keeps the result inside [min, max].
  const auto [lo, hi] = std::minmax_element(payoffs.begin(), payoffs.end());
  double weight = 1.0;
  double num = 0.0;
  double den = 0.0;
  for (double r : payoffs) {
    num += weight * (r - *lo);
    den += weight;
    weight *= discount.delta;
  }
  return std::clamp(*lo + num / den, *lo, *hi);
}

double MeanReward(std::span<const double> payoffs) {
  RequireValues(payoffs);
  const auto [lo, hi] = std::minmax_element(payoffs.begin(), payoffs.end());
  double sum = 0.0;
  for (double r : payoffs) sum += r - *lo;
  return std::clamp(*lo + sum / static_cast<double>(payoffs.size()), *lo, *hi);
}

std::vector<double> PayoffStream(const RunLog& log, int seat) {
  std::vector<double> out;
  out.reserve(log.records.size());
  for (const RoundRecord& r : log.records) {
    out.push_back(r.payoffs.at(static_cast<std::size_t>(seat)).value());
  }
  return out;
}

std::vector<double> RoundCooperation(const RunLog& log) {
  const GameSpec& game = GetGame(log.config.game);
  std::vector<double> out;
  out.reserve(log.records.size());
  for (const RoundRecord& r : log.records) {
    int c = 0;
    for (Action a : r.actions) c += IsCooperative(game, a) ? 1 : 0;
    out.push_back(static_cast<double>(c) / static_cast<double>(game.n_players));
  }
  return out;
}

Aggregate AggregateValues(std::span<const double> values, StdKind kind) {
  if (values.empty()) throw Error(ErrorCode::kEmptyRun, "nothing to aggregate");
  Aggregate a;
  a.n = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / a.n;
  if (a.n == 1) {
    a.single_value = true;
    return a;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(ss / (kind == StdKind::kSample ? a.n - 1 : a.n));
  return a;
}

Aggregate AggregatePerRound(std::span<const RunLog> logs, StdKind kind) {
  std::vector<double> all;
  for (const RunLog& log : logs) {
    const auto rounds = RoundCooperation(log);
    all.insert(all.end(), rounds.begin(), rounds.end());
  }
  return AggregateValues(all, kind);
}

RunSummary Summarize(const RunLog& log, DiscountSpec discount) {
  const CooperationRates rates = CooperationRate(log);
  RunSummary s;
  s.coop_rate_overall = rates.overall;
  s.coop_rate_per_player = rates.per_player;
  const int n = GetGame(log.config.game).n_players;
  for (int seat = 0; seat < n; ++seat) {
    const auto stream = PayoffStream(log, seat);
    s.discounted_reward_per_player.push_back(DiscountedReward(stream, discount));
    s.mean_reward_per_player.push_back(MeanReward(stream));
  }
  std::vector<double> totals;
  totals.reserve(log.records.size());
  for (const RoundRecord& r : log.records) {
    Points total;
    for (Points p : r.payoffs) total = total + p;
    totals.push_back(total.value() / n);
  }
  s.group_welfare = MeanReward(totals);
  return s;
}

double AsymmetryDelta(const RunSummary& summary, std::span<const int> group_a,
                      std::span<const int> group_b) {
  if (group_a.empty() || group_b.empty()) {
    throw Error(ErrorCode::kInvalidGrouping, "groups must be non-empty");
  }
  const int n = static_cast<int>(summary.coop_rate_per_player.size());
  std::set<int> seen;
  auto mean_of = [&](std::span<const int> group) {
    double sum = 0.0;
    for (int seat : group) {
      if (seat < 0 || seat >= n) throw Error(ErrorCode::kInvalidGrouping, "seat out of range");
      if (!seen.insert(seat).second) {
        throw Error(ErrorCode::kInvalidGrouping, "groups overlap or repeat a seat");
      }
      sum += summary.coop_rate_per_player[static_cast<std::size_t>(seat)];
    }
    return sum / static_cast<double>(group.size());
  };
  const double a = mean_of(group_a);
  const double b = mean_of(group_b);
  return (a - b) * 100.0;
}

}  // namespace dilemma
