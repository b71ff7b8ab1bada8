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

#include "dilemma/harness.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "dilemma/error.h"
#include "dilemma/lexalysis.h"
#include "dilemma/metrics.h"
#include "dilemma/rng.h"
#include "json_detail.h"

namespace dilemma {

namespace fs = std::filesystem;
using detail::Get;
using detail::GetOr;
using detail::json;
using detail::ordered_json;
using detail::RequireKnownKeys;

namespace {

constexpr int kMaxPlayers = 3;

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s(buf);
  // Avoid "-0.00" so identical cells print identically.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string Fixed(const std::optional<double>& v, int digits) {
  return v ? Fixed(*v, digits) : std::string();
}

// Setting names become run-id components, so they may not contain '-'.
bool ValidName(std::string_view name, bool allow_dash = false) {
  if (name.empty() || name.front() == '.') return false;
  return std::all_of(name.begin(), name.end(), [allow_dash](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || (allow_dash && c == '-');
  });
}

EndpointConfig EndpointFromJson(const json& j) {
  RequireKnownKeys(j, {"base_url", "api_key_env", "max_concurrent", "timeout_ms", "retry"},
                   "endpoint");
  EndpointConfig e;
  e.base_url = Get<std::string>(j, "base_url", "endpoint");
  e.api_key_env = Get<std::string>(j, "api_key_env", "endpoint");
  e.max_concurrent = GetOr<int>(j, "max_concurrent", e.max_concurrent, "endpoint");
  e.timeout = std::chrono::milliseconds(
      GetOr<std::int64_t>(j, "timeout_ms", e.timeout.count(), "endpoint"));
  if (j.contains("retry")) {
    const json& r = j["retry"];
    RequireKnownKeys(r, {"max_attempts", "backoff_base_ms", "backoff_cap_ms"}, "retry");
    e.retry.max_attempts = GetOr<int>(r, "max_attempts", e.retry.max_attempts, "retry");
    e.retry.backoff_base = std::chrono::milliseconds(
        GetOr<std::int64_t>(r, "backoff_base_ms", e.retry.backoff_base.count(), "retry"));
    e.retry.backoff_cap = std::chrono::milliseconds(
        GetOr<std::int64_t>(r, "backoff_cap_ms", e.retry.backoff_cap.count(), "retry"));
  }
  e.Validate();
  return e;
}

template <typename T>
std::string JoinNumbers(const std::vector<T>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

bool AllEqual(const std::vector<int>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

// Report key of one run.
struct CellKey {
  GameKind game;
  std::string agent;
  std::vector<int> hl;
  std::string mode;
  std::string sanitize_mode;
  int x = -1;  // -1 when not sanitized

  auto Tie() const { return std::tie(game, agent, hl, mode, sanitize_mode, x); }
  bool operator<(const CellKey& o) const { return Tie() < o.Tie(); }
  bool operator==(const CellKey& o) const { return Tie() == o.Tie(); }

  std::string HlColumn() const { return AllEqual(hl) ? std::to_string(hl.front()) : JoinNumbers(hl, '/'); }
  std::string XColumn() const { return x < 0 ? std::string() : std::to_string(x); }
};

CellKey KeyOf(const RunLog& log) {
  CellKey k;
  k.game = log.config.game;
  if (!log.meta.setting.empty()) {
    k.agent = log.meta.setting;
  } else {
    for (std::size_t i = 0; i < log.config.bindings.size(); ++i) {
      const std::string label = log.config.bindings[i].Label();
      if (i == 0 || label != log.config.bindings[0].Label()) k.agent += (i ? "+" : "") + label;
    }
  }
  k.hl = log.config.hl;
  k.mode = PromptModeName(log.config.prompt_mode);
  k.sanitize_mode = "off";
  for (const SanitizationConfig& s : log.config.sanitization) {
    if (s.mode == SanitizeMode::kOff) continue;
    k.sanitize_mode = SanitizeModeName(s.mode);
    k.x = s.x_real;
    break;
  }
  return k;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

double SeatMean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

bool Usable(const RunLog& log) {
  return log.termination.kind != Termination::Kind::kAborted && !log.records.empty();
}

std::optional<RunLexicalSummary> LexicalOf(const RunLog& log) {
  try {
    return AnalyzeRun(log);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoTraces) return std::nullopt;
    throw;
  }
}

}  // namespace

ExperimentPlan ParsePlan(std::string_view text) {
  const json j = detail::ParseJson(text, "experiment plan");
  RequireKnownKeys(j,
                   {"schema_version", "name", "games", "settings", "hl_values", "asymmetric",
                    "sanitization", "prompt_modes", "seeds", "horizon", "continuation_pct",
                    "seed_base", "output_dir", "endpoint", "capture_prompts"},
                   "experiment plan");
  ExperimentPlan plan;
  const int version = GetOr<int>(j, "schema_version", ExperimentPlan::kSchemaVersion, "plan");
  if (version != ExperimentPlan::kSchemaVersion) {
    throw Error(ErrorCode::kConfigError, "unsupported plan schema_version " + std::to_string(version));
  }
  plan.name = GetOr<std::string>(j, "name", "", "plan");
  for (const std::string& g : Get<std::vector<std::string>>(j, "games", "plan")) {
    plan.games.push_back(ParseGameCode(g));
  }
  if (!j.contains("settings") || !j["settings"].is_array()) {
    throw Error(ErrorCode::kConfigError, "plan needs a 'settings' list");
  }
  std::set<std::string> names;
  for (const json& s : j["settings"]) {
    RequireKnownKeys(s, {"name", "bindings"}, "setting");
    Setting setting;
    setting.name = Get<std::string>(s, "name", "setting");
    if (!ValidName(setting.name)) {
      throw Error(ErrorCode::kConfigError,
                  "setting name '" + setting.name + "' must match [A-Za-z0-9_.]+");
    }
    if (!names.insert(setting.name).second) {
      throw Error(ErrorCode::kConfigError, "duplicate setting '" + setting.name + "'");
    }
    if (!s.contains("bindings") || !s["bindings"].is_array() || s["bindings"].empty()) {
      throw Error(ErrorCode::kConfigError, "setting '" + setting.name + "' needs bindings");
    }
    for (const json& b : s["bindings"]) setting.bindings.push_back(detail::BindingFromJson(b));
    plan.settings.push_back(std::move(setting));
  }
  plan.hl_values = GetOr<std::vector<int>>(j, "hl_values", plan.hl_values, "plan");
  plan.asymmetric = GetOr<std::vector<std::vector<int>>>(j, "asymmetric", {}, "plan");
  if (j.contains("sanitization") && !j["sanitization"].is_null()) {
    const json& s = j["sanitization"];
    RequireKnownKeys(s, {"mode", "x_values", "window"}, "sanitization sweep");
    SanitizationSweep sweep;
    sweep.mode = ParseSanitizeMode(Get<std::string>(s, "mode", "sanitization sweep"));
    sweep.x_values = Get<std::vector<int>>(s, "x_values", "sanitization sweep");
    sweep.window = GetOr<int>(s, "window", 80, "sanitization sweep");
    if (sweep.mode == SanitizeMode::kOff) {
      throw Error(ErrorCode::kConfigError, "a sanitization sweep needs a mode other than 'off'");
    }
    plan.sanitization = sweep;
  }
  if (plan.sanitization && !plan.asymmetric.empty()) {
    throw Error(ErrorCode::kConfigError, "sanitization and asymmetric sweeps cannot be combined");
  }
  if (j.contains("prompt_modes")) {
    plan.prompt_modes.clear();
    for (const std::string& m : Get<std::vector<std::string>>(j, "prompt_modes", "plan")) {
      plan.prompt_modes.push_back(ParsePromptMode(m));
    }
  }
  plan.seeds = GetOr<int>(j, "seeds", plan.seeds, "plan");
  if (j.contains("horizon")) plan.horizon = detail::HorizonFromJson(j["horizon"]);
  plan.horizon.Validate();
  plan.continuation_pct = GetOr<double>(j, "continuation_pct", plan.continuation_pct, "plan");
  plan.seed_base = GetOr<std::uint64_t>(j, "seed_base", 0, "plan");
  plan.output_dir = GetOr<std::string>(j, "output_dir", plan.output_dir, "plan");
  if (j.contains("endpoint") && !j["endpoint"].is_null()) {
    plan.endpoint = EndpointFromJson(j["endpoint"]);
  }
  plan.capture_prompts = GetOr<bool>(j, "capture_prompts", false, "plan");
  return plan;
}

SingleRun ParseSingleRun(std::string_view text, std::string_view fallback_id) {
  const json j = detail::ParseJson(text, "run config");
  SingleRun out;
  out.run.meta.run_id = std::string(fallback_id);
  if (!j.is_object() || !j.contains("match")) {
    out.run.config = detail::ConfigFromJson(j);
    return out;
  }
  RequireKnownKeys(j, {"schema_version", "run_id", "setting", "output_dir", "endpoint",
                       "capture_prompts", "match"},
                   "run config");
  const int version = GetOr<int>(j, "schema_version", ExperimentPlan::kSchemaVersion, "run");
  if (version != ExperimentPlan::kSchemaVersion) {
    throw Error(ErrorCode::kConfigError, "unsupported run schema_version " + std::to_string(version));
  }
  out.run.meta.run_id = GetOr<std::string>(j, "run_id", out.run.meta.run_id, "run config");
  out.run.meta.setting = GetOr<std::string>(j, "setting", "", "run config");
  if (!ValidName(out.run.meta.run_id, /*allow_dash=*/true)) {
    throw Error(ErrorCode::kConfigError, "run_id must match [A-Za-z0-9_.-]+");
  }
  out.output_dir = GetOr<std::string>(j, "output_dir", out.output_dir, "run config");
  if (j.contains("endpoint") && !j["endpoint"].is_null()) {
    out.endpoint = EndpointFromJson(j["endpoint"]);
  }
  out.capture_prompts = GetOr<bool>(j, "capture_prompts", false, "run config");
  out.run.config = detail::ConfigFromJson(j["match"]);
  return out;
}

ExperimentPlan LoadPlan(const fs::path& path) { return ParsePlan(ReadFile(path)); }

std::string MemoryLabel(const MatchConfig& cfg) {
  for (const SanitizationConfig& s : cfg.sanitization) {
    if (s.mode != SanitizeMode::kOff) {
      return std::string(SanitizeModeName(s.mode)) + "_x" + std::to_string(s.x_real);
    }
  }
  if (AllEqual(cfg.hl)) return "hl" + std::to_string(cfg.hl.front());
  return "hl" + JoinNumbers(cfg.hl, '_');
}

std::vector<PlannedRun> Expand(const ExperimentPlan& plan) {
  auto require = [](bool non_empty, const char* axis) {
    if (!non_empty) throw Error(ErrorCode::kEmptyPlan, std::string("plan axis '") + axis + "' is empty");
  };
  require(!plan.games.empty(), "games");
  require(!plan.settings.empty(), "settings");
  require(!plan.prompt_modes.empty(), "prompt_modes");
  require(plan.seeds > 0, "seeds");
  if (plan.sanitization) {
    require(!plan.sanitization->x_values.empty(), "sanitization.x_values");
  } else if (plan.asymmetric.empty()) {
    require(!plan.hl_values.empty(), "hl_values");
  }

  std::vector<PlannedRun> out;
  std::set<std::string> ids;
  for (GameKind game : plan.games) {
    const auto n = static_cast<std::size_t>(GetGame(game).n_players);
    // Memory axis: (hl per seat, sanitization per seat).
    std::vector<std::pair<std::vector<int>, std::vector<SanitizationConfig>>> memory;
    if (plan.sanitization) {
      for (int x : plan.sanitization->x_values) {
        SanitizationConfig s{plan.sanitization->mode, x, plan.sanitization->window};
        s.Validate();
        memory.push_back({std::vector<int>(n, s.window), std::vector<SanitizationConfig>(n, s)});
      }
    } else if (!plan.asymmetric.empty()) {
      for (const std::vector<int>& hl : plan.asymmetric) {
        if (hl.size() != n) {
          throw Error(ErrorCode::kConfigError,
                      "asymmetric HL vector " + JoinNumbers(hl, '/') + " does not fit " +
                          std::string(GameCode(game)) + " (" + std::to_string(n) + " players)");
        }
        memory.push_back({hl, {}});
      }
    } else {
      for (int hl : plan.hl_values) memory.push_back({std::vector<int>(n, hl), {}});
    }

    for (const Setting& setting : plan.settings) {
      for (const auto& [hl, sanitization] : memory) {
        for (PromptMode mode : plan.prompt_modes) {
          MatchConfig cfg;
          cfg.game = game;
          cfg.bindings = setting.bindings;
          if (cfg.bindings.size() == 1) cfg.bindings.assign(n, cfg.bindings.front());
          cfg.hl = hl;
          cfg.horizon = plan.horizon;
          cfg.prompt_mode = mode;
          cfg.sanitization = sanitization;
          cfg.continuation_pct = plan.continuation_pct;
          const std::string cell = std::string(GameCode(game)) + "-" + setting.name + "-" +
                                   MemoryLabel(cfg) + "-" + std::string(PromptModeName(mode));
          for (int k = 0; k < plan.seeds; ++k) {
            PlannedRun run;
            run.meta.run_id = cell + "-seed" + std::to_string(k);
            run.meta.setting = setting.name;
            run.meta.seed_index = k;
            run.config = cfg;
            run.config.seed =
                MixSeed(plan.seed_base, StableHash(cell), static_cast<std::uint64_t>(k));
            try {
              run.config.Validate();
            } catch (const Error& e) {
              throw Error(ErrorCode::kConfigError, run.meta.run_id + ": " + e.message());
            }
            if (!ids.insert(run.meta.run_id).second) {
              throw Error(ErrorCode::kConfigError, "duplicate run id " + run.meta.run_id);
            }
            out.push_back(std::move(run));
          }
        }
      }
    }
  }
  return out;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const fs::path& path, std::string_view contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

ExecuteSummary Execute(const std::vector<PlannedRun>& runs, const fs::path& out_dir,
                       const ExecuteOptions& opts) {
  fs::create_directories(out_dir);
  if (opts.capture_prompts) fs::create_directories(out_dir / "prompts");
  ExecuteSummary summary;
  summary.planned = runs.size();
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto run_one = [&](const PlannedRun& run) {
    const fs::path path = out_dir / (run.meta.run_id + ".jsonl");
    if (opts.resume && fs::exists(path)) {
      try {
        if (RunLogFromJsonl(ReadFile(path)).termination.kind != Termination::Kind::kAborted) {
          std::lock_guard lock(mu);
          ++summary.skipped;
          return;
        }
      } catch (const Error&) {
        // Unreadable leftovers are rerun.
      }
    }
    try {
      std::string prompts;
      PromptObserver observer;
      if (opts.capture_prompts) {
        observer = [&prompts](const Observation& obs, std::string_view prompt) {
          ordered_json j;
          j["round"] = obs.round;
          j["seat"] = "P" + std::to_string(obs.focal + 1);
          j["prompt"] = prompt;
          prompts += j.dump();
          prompts += '\n';
        };
      }
      RunLog log = RunMatch(run.config, opts.client, observer);
      log.meta = run.meta;
      WriteFileAtomic(path, RunLogToJsonl(log));
      if (opts.capture_prompts) {
        WriteFileAtomic(out_dir / "prompts" / (run.meta.run_id + ".jsonl"), prompts);
      }
      std::lock_guard lock(mu);
      ++summary.executed;
      if (log.termination.kind == Termination::Kind::kAborted) {
        summary.failures.emplace_back(run.meta.run_id,
                                      "aborted after round " +
                                          std::to_string(log.termination.round) + ": " +
                                          log.termination.reason);
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      summary.failures.emplace_back(run.meta.run_id, e.what());
    }
  };

  {
    const int workers = std::clamp(opts.parallelism, 1, static_cast<int>(std::max<std::size_t>(runs.size(), 1)));
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) run_one(runs[i]);
      });
    }
  }
  std::sort(summary.failures.begin(), summary.failures.end());
  return summary;
}

std::vector<RunLog> LoadRunDir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIoError, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunLog> logs;
  for (const fs::path& f : files) {
    try {
      logs.push_back(RunLogFromJsonl(ReadFile(f)));
    } catch (const Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.message());
    }
  }
  return logs;
}

ReportTables BuildReport(const std::vector<RunLog>& logs) {
  struct Row {
    CellKey key;
    const RunLog* log;
    RunSummary summary;
    std::optional<RunLexicalSummary> lexical;
  };
  std::vector<Row> rows;
  std::vector<const RunLog*> excluded;
  for (const RunLog& log : logs) {
    if (!Usable(log)) {
      excluded.push_back(&log);
      continue;
    }
    rows.push_back({KeyOf(log), &log, Summarize(log), LexicalOf(log)});
  }
  if (rows.empty()) throw Error(ErrorCode::kNoRuns, "no completed run logs to report");
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.key, a.log->meta.seed_index, a.log->meta.run_id) <
           std::tie(b.key, b.log->meta.seed_index, b.log->meta.run_id);
  });

  ReportTables t;
  std::string& runs = t.runs_csv;
  runs = "run_id,game,agent,hl,mode,sanitize_mode,x,seed,coop_rate";
  for (int i = 1; i <= kMaxPlayers; ++i) runs += ",coop_pp_player_" + std::to_string(i);
  for (int i = 1; i <= kMaxPlayers; ++i) runs += ",disc_reward_" + std::to_string(i);
  for (int i = 1; i <= kMaxPlayers; ++i) runs += ",mean_reward_" + std::to_string(i);
  runs += ",fwd_ratio,paranoia_ratio,defect_mention_rate\n";
  for (const Row& r : rows) {
    runs += CsvField(r.log->meta.run_id) + "," + std::string(GameCode(r.key.game)) + "," +
            CsvField(r.key.agent) + "," + r.key.HlColumn() + "," + r.key.mode + "," +
            r.key.sanitize_mode + "," + r.key.XColumn() + "," +
            std::to_string(r.log->meta.seed_index) + "," +
            Fixed(100.0 * r.summary.coop_rate_overall, 4);
    auto per_seat = [&](const std::vector<double>& v, double scale) {
      for (std::size_t i = 0; i < kMaxPlayers; ++i) {
        runs += ",";
        if (i < v.size()) runs += Fixed(scale * v[i], 4);
      }
    };
    per_seat(r.summary.coop_rate_per_player, 100.0);
    per_seat(r.summary.discounted_reward_per_player, 1.0);
    per_seat(r.summary.mean_reward_per_player, 1.0);
    if (r.lexical) {
      runs += "," + Fixed(r.lexical->total.fwd_ratio, 6) + "," +
              Fixed(r.lexical->total.paranoia_ratio, 6) + "," +
              Fixed(r.lexical->defect_mention_rate, 6) + "\n";
    } else {
      runs += ",,,\n";
    }
  }

  t.summary_csv =
      "game,agent,hl,mode,sanitize_mode,x,runs,coop_mean,coop_std,disc_reward_mean,"
      "disc_reward_std,mean_reward_mean,mean_reward_std,fwd_ratio,paranoia_ratio,"
      "defect_mention_rate\n";
  std::string md_rows;
  bool any_lexical = false;
  for (const Row& r : rows) any_lexical = any_lexical || r.lexical.has_value();

  for (std::size_t begin = 0; begin < rows.size();) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].key == rows[begin].key) ++end;
    const CellKey& key = rows[begin].key;
    std::vector<double> coop;
    std::vector<double> disc;
    std::vector<double> mean;
    std::vector<RunLog> group_logs;
    TraceStats lex;
    int traces = 0;
    double mentions = 0.0;
    bool has_lex = false;
    for (std::size_t i = begin; i < end; ++i) {
      const Row& r = rows[i];
      coop.push_back(r.summary.coop_rate_overall);
      disc.push_back(SeatMean(r.summary.discounted_reward_per_player));
      mean.push_back(SeatMean(r.summary.mean_reward_per_player));
      group_logs.push_back(*r.log);
      if (r.lexical) {
        has_lex = true;
        lex.fwd += r.lexical->total.fwd;
        lex.react += r.lexical->total.react;
        lex.paranoia += r.lexical->total.paranoia;
        lex.coop += r.lexical->total.coop;
        traces += r.lexical->trace_count;
        mentions += r.lexical->defect_mention_rate * r.lexical->trace_count;
      }
    }
    // Memoryless cells are independent one-shot rounds; their spread is
    // taken over rounds.
    const bool memoryless = AllEqual(key.hl) && key.hl.front() == 0 && key.x < 0;
    const Aggregate c = memoryless ? AggregatePerRound(group_logs) : AggregateValues(coop);
    const Aggregate d = AggregateValues(disc);
    const Aggregate m = AggregateValues(mean);
    std::optional<double> fwd_ratio;
    std::optional<double> paranoia_ratio;
    std::optional<double> mention_rate;
    if (has_lex) {
      if (lex.fwd + lex.react > 0) fwd_ratio = static_cast<double>(lex.fwd) / (lex.fwd + lex.react);
      if (lex.paranoia + lex.coop > 0) {
        paranoia_ratio = static_cast<double>(lex.paranoia) / (lex.paranoia + lex.coop);
      }
      if (traces > 0) mention_rate = mentions / traces;
    }
    const std::size_t n_runs = end - begin;
    t.summary_csv += std::string(GameCode(key.game)) + "," + CsvField(key.agent) + "," +
                     key.HlColumn() + "," + key.mode + "," + key.sanitize_mode + "," +
                     key.XColumn() + "," + std::to_string(n_runs) + "," +
                     Fixed(100.0 * c.mean, 4) + "," + Fixed(100.0 * c.std, 4) + "," +
                     Fixed(d.mean, 4) + "," + Fixed(d.std, 4) + "," + Fixed(m.mean, 4) + "," +
                     Fixed(m.std, 4) + "," + Fixed(fwd_ratio, 6) + "," +
                     Fixed(paranoia_ratio, 6) + "," + Fixed(mention_rate, 6) + "\n";

    const std::string sanitize =
        key.x < 0 ? "off" : key.sanitize_mode + " X=" + std::to_string(key.x);
    md_rows += "| " + std::string(GameDisplayName(key.game)) + " | " + key.agent + " | " +
               key.HlColumn() + " | " + key.mode + " | " + sanitize + " | " +
               std::to_string(n_runs) + " | " + Fixed(100.0 * c.mean, 1) + " ± " +
               Fixed(100.0 * c.std, 1) + " | " + Fixed(d.mean, 2) + " ± " + Fixed(d.std, 2) +
               " | " + Fixed(m.mean, 2) + " ± " + Fixed(m.std, 2) + " |";
    if (any_lexical) {
      auto cell = [](const std::optional<double>& v, double scale, int digits) {
        return v ? Fixed(scale * *v, digits) : std::string("n/a");
      };
      md_rows += " " + cell(fwd_ratio, 1.0, 3) + " | " + cell(paranoia_ratio, 1.0, 3) + " | " +
                 cell(mention_rate, 100.0, 1) + " |";
    }
    md_rows += "\n";
    begin = end;
  }

  std::string& md = t.summary_md;
  md = "# Summary\n\n";
  md += "Cooperation is the mean percentage of cooperative actions ± standard deviation "
        "across seeds. Rewards are per-round payoffs averaged over seats.\n\n";
  md += "| Game | Agent | HL | Mode | Sanitize | Runs | Cooperation (%) | Disc. reward | Mean reward |";
  if (any_lexical) md += " Fwd ratio | Paranoia ratio | Defect mentions (%) |";
  md += "\n|---|---|---|---|---|---|---|---|---|";
  if (any_lexical) md += "---|---|---|";
  md += "\n" + md_rows;
  if (!excluded.empty()) {
    md += "\nExcluded runs:\n\n";
    for (const RunLog* log : excluded) {
      md += "- " + log->meta.run_id + ": " + std::string(TerminationKindName(log->termination.kind)) +
            " after round " + std::to_string(log->termination.round);
      if (!log->termination.reason.empty()) md += " (" + log->termination.reason + ")";
      md += "\n";
    }
  }
  return t;
}

ReportTables Report(const fs::path& run_dir) {
  const std::vector<RunLog> logs = LoadRunDir(run_dir);
  if (logs.empty()) throw Error(ErrorCode::kNoRuns, "no run logs in " + run_dir.string());
  ReportTables t = BuildReport(logs);
  WriteFileAtomic(run_dir / "runs.csv", t.runs_csv);
  WriteFileAtomic(run_dir / "summary.csv", t.summary_csv);
  WriteFileAtomic(run_dir / "summary.md", t.summary_md);
  return t;
}

std::string BuildLexicalCsv(const std::vector<RunLog>& logs) {
  std::vector<std::pair<const RunLog*, RunLexicalSummary>> rows;
  for (const RunLog& log : logs) {
    if (auto lex = LexicalOf(log)) rows.emplace_back(&log, std::move(*lex));
  }
  if (rows.empty()) throw Error(ErrorCode::kNoTraces, "no run carries reasoning traces");
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(KeyOf(*a.first), a.first->meta.seed_index, a.first->meta.run_id) <
           std::make_tuple(KeyOf(*b.first), b.first->meta.seed_index, b.first->meta.run_id);
  });
  std::string out =
      "run_id,game,agent,hl,mode,sanitize_mode,x,seed,traces,words,fwd_count,react_count,"
      "paranoia_count,coop_count,fwd_per_1000,react_per_1000,fwd_ratio,paranoia_ratio,"
      "defect_mention_rate\n";
  for (const auto& [log, lex] : rows) {
    const CellKey key = KeyOf(*log);
    const TraceStats& s = lex.total;
    out += CsvField(log->meta.run_id) + "," + std::string(GameCode(key.game)) + "," +
           CsvField(key.agent) + "," + key.HlColumn() + "," + key.mode + "," +
           key.sanitize_mode + "," + key.XColumn() + "," + std::to_string(log->meta.seed_index) +
           "," + std::to_string(lex.trace_count) + "," + std::to_string(s.word_count) + "," +
           std::to_string(s.fwd) + "," + std::to_string(s.react) + "," +
           std::to_string(s.paranoia) + "," + std::to_string(s.coop) + "," +
           Fixed(Per1000(s.fwd, s.word_count), 6) + "," +
           Fixed(Per1000(s.react, s.word_count), 6) + "," + Fixed(s.fwd_ratio, 6) + "," +
           Fixed(s.paranoia_ratio, 6) + "," + Fixed(lex.defect_mention_rate, 6) + "\n";
  }
  return out;
}

std::string Analyze(const fs::path& run_dir) {
  const std::string csv = BuildLexicalCsv(LoadRunDir(run_dir));
  WriteFileAtomic(run_dir / "lexical.csv", csv);
  return csv;
}

std::vector<CurationRecord> LoadCurationInputs(const fs::path& trace_dir) {
  if (!fs::is_directory(trace_dir)) {
    throw Error(ErrorCode::kIoError, trace_dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(trace_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CurationRecord> out;
  for (const fs::path& f : files) {
    const std::string text = ReadFile(f);
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (first) {
        first = false;
        const json head = json::parse(line, nullptr, false);
        if (head.is_object() && head.value("type", "") == "header") {
          for (CurationRecord& r : RecordsFromRunLog(RunLogFromJsonl(text))) {
            out.push_back(std::move(r));
          }
          break;
        }
      }
      try {
        out.push_back(CurationRecordFromJson(line));
      } catch (const Error& e) {
        throw Error(e.code(), f.filename().string() + ": " + e.message());
      }
    }
  }
  if (out.empty()) throw Error(ErrorCode::kNoTraces, "no traces found in " + trace_dir.string());
  return out;
}

CurateOutputs Curate(const fs::path& trace_dir, const fs::path& out_dir,
                     const CurationOptions& opts, ExportOptions export_opts) {
  CurateOutputs out;
  out.result = RunCuration(LoadCurationInputs(trace_dir), opts);
  fs::create_directories(out_dir);
  out.training = out_dir / "curated.jsonl";
  out.retention = out_dir / "retention.csv";
  WriteFileAtomic(out.training, ExportTraining(out.result.records, export_opts));
  WriteFileAtomic(out.retention, RetentionReportCsv(out.result.retention));
  return out;
}

}  // namespace dilemma
