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

// JSONL encoding of match configs and run logs. Field names here are the
// external contract read by the report and curation tools.

#include <initializer_list>
#include <set>
#include <sstream>

#include "dilemma/engine.h"
#include "dilemma/error.h"
#include "json_detail.h"

namespace dilemma {

namespace detail {

constexpr int kSchemaVersion = 1;

std::string SeatKey(std::size_t seat) { return "P" + std::to_string(seat + 1); }

ordered_json BindingToJson(const AgentBinding& b) {
  ordered_json j;
  if (const auto* s = std::get_if<ScriptedSpec>(&b.kind)) {
    j["kind"] = "scripted";
    j["strategy"] = StrategyName(s->strategy);
    j["p"] = s->p;
    j["seed"] = s->seed;
  } else {
    const auto& l = std::get<LlmSpec>(b.kind);
    j["kind"] = "llm";
    j["model"] = l.model_name;
    j["endpoint"] = l.endpoint_ref;
  }
  j["retry_limit"] = b.retry_limit;
  j["fallback"] = FallbackName(b.fallback);
  return j;
}

AgentBinding BindingFromJson(const json& j) {
  AgentBinding b;
  if (j.is_string()) {
    b.kind = ScriptedSpec{ParseStrategy(j.get<std::string>()), 0.5, 0};
    return b;
  }
  const std::string kind = Get<std::string>(j, "kind", "binding");
  if (kind == "scripted") {
    RequireKnownKeys(j, {"kind", "strategy", "p", "seed", "retry_limit", "fallback"},
                     "scripted binding");
    ScriptedSpec s;
    s.strategy = ParseStrategy(Get<std::string>(j, "strategy", "scripted binding"));
    s.p = GetOr<double>(j, "p", 0.5, "scripted binding");
    s.seed = GetOr<std::uint64_t>(j, "seed", 0, "scripted binding");
    if (!(s.p >= 0.0 && s.p <= 1.0)) {
      throw Error(ErrorCode::kConfigError, "random_coop p must lie in [0, 1]");
    }
    b.kind = s;
  } else if (kind == "llm") {
    RequireKnownKeys(j, {"kind", "model", "endpoint", "retry_limit", "fallback"}, "llm binding");
    LlmSpec l;
    l.model_name = Get<std::string>(j, "model", "llm binding");
    l.endpoint_ref = GetOr<std::string>(j, "endpoint", "default", "llm binding");
    b.kind = l;
  } else {
    throw Error(ErrorCode::kConfigError, "binding kind must be 'scripted' or 'llm'");
  }
  b.retry_limit = GetOr<int>(j, "retry_limit", 3, "binding");
  b.fallback = ParseFallback(GetOr<std::string>(j, "fallback", "abort", "binding"));
  return b;
}

ordered_json HorizonToJson(const Horizon& h) {
  ordered_json j;
  if (h.kind == Horizon::Kind::kFixed) {
    j["kind"] = "fixed";
    j["rounds"] = h.rounds;
  } else {
    j["kind"] = "geometric";
    j["p"] = h.p;
    j["cap"] = h.cap;
  }
  return j;
}

Horizon HorizonFromJson(const json& j) {
  const std::string kind = Get<std::string>(j, "kind", "horizon");
  if (kind == "fixed") {
    RequireKnownKeys(j, {"kind", "rounds"}, "horizon");
    return Horizon::Fixed(GetOr<int>(j, "rounds", 500, "horizon"));
  }
  if (kind == "geometric") {
    RequireKnownKeys(j, {"kind", "p", "cap"}, "horizon");
    return Horizon::Geometric(GetOr<double>(j, "p", 0.99, "horizon"),
                              GetOr<int>(j, "cap", 500, "horizon"));
  }
  throw Error(ErrorCode::kConfigError, "horizon kind must be 'fixed' or 'geometric'");
}

ordered_json SanitizationToJson(const SanitizationConfig& s) {
  ordered_json j;
  j["mode"] = SanitizeModeName(s.mode);
  j["x_real"] = s.x_real;
  j["window"] = s.window;
  return j;
}

SanitizationConfig SanitizationFromJson(const json& j) {
  RequireKnownKeys(j, {"mode", "x_real", "window"}, "sanitization");
  SanitizationConfig s;
  s.mode = ParseSanitizeMode(GetOr<std::string>(j, "mode", "off", "sanitization"));
  s.x_real = GetOr<int>(j, "x_real", 0, "sanitization");
  s.window = GetOr<int>(j, "window", 80, "sanitization");
  return s;
}

ordered_json ConfigToJson(const MatchConfig& cfg) {
  ordered_json j;
  j["game"] = GameCode(cfg.game);
  j["bindings"] = ordered_json::array();
  for (const AgentBinding& b : cfg.bindings) j["bindings"].push_back(BindingToJson(b));
  j["hl"] = cfg.hl;
  j["horizon"] = HorizonToJson(cfg.horizon);
  j["prompt_mode"] = PromptModeName(cfg.prompt_mode);
  if (!cfg.sanitization.empty()) {
    j["sanitization"] = ordered_json::array();
    for (const auto& s : cfg.sanitization) j["sanitization"].push_back(SanitizationToJson(s));
  }
  j["seed"] = cfg.seed;
  j["continuation_pct"] = cfg.continuation_pct;
  return j;
}

MatchConfig ConfigFromJson(const json& j) {
  RequireKnownKeys(j, {"game", "bindings", "hl", "horizon", "prompt_mode", "sanitization", "seed",
                       "continuation_pct"},
                   "match config");
  MatchConfig cfg;
  cfg.game = ParseGameCode(Get<std::string>(j, "game", "match config"));
  const int n = GetGame(cfg.game).n_players;
  if (!j.contains("bindings") || !j["bindings"].is_array()) {
    throw Error(ErrorCode::kConfigError, "match config needs a 'bindings' list");
  }
  for (const auto& b : j["bindings"]) cfg.bindings.push_back(BindingFromJson(b));
  if (cfg.bindings.size() == 1) cfg.bindings.assign(static_cast<std::size_t>(n), cfg.bindings[0]);
  if (j.contains("hl") && j["hl"].is_number_integer()) {
    cfg.hl.assign(static_cast<std::size_t>(n), j["hl"].get<int>());
  } else {
    cfg.hl = Get<std::vector<int>>(j, "hl", "match config");
  }
  if (j.contains("horizon")) cfg.horizon = HorizonFromJson(j["horizon"]);
  cfg.prompt_mode =
      ParsePromptMode(GetOr<std::string>(j, "prompt_mode", "reasoning", "match config"));
  if (j.contains("sanitization")) {
    const json& s = j["sanitization"];
    if (s.is_object()) {
      cfg.sanitization.assign(static_cast<std::size_t>(n), SanitizationFromJson(s));
    } else if (s.is_array()) {
      for (const auto& item : s) cfg.sanitization.push_back(SanitizationFromJson(item));
    } else {
      throw Error(ErrorCode::kConfigError, "sanitization must be an object or a list");
    }
    bool any = false;
    for (const auto& item : cfg.sanitization) any = any || item.mode != SanitizeMode::kOff;
    if (!any) cfg.sanitization.clear();
  }
  cfg.seed = GetOr<std::uint64_t>(j, "seed", 0, "match config");
  cfg.continuation_pct = GetOr<double>(j, "continuation_pct", 0.99, "match config");
  cfg.Validate();
  return cfg;
}

json ParseJson(std::string_view text, std::string_view what) {
  auto parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::kConfigError, "invalid JSON in " + std::string(what));
  }
  return parsed;
}

template <typename T, typename F>
ordered_json PerSeat(const std::vector<T>& values, F&& convert) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < values.size(); ++i) j[SeatKey(i)] = convert(values[i]);
  return j;
}

RoundRecord RoundFromJson(const json& j, int n) {
  RequireKnownKeys(j, {"round", "actions", "payoffs", "traces", "retries", "fallback"}, "round");
  RoundRecord r;
  r.round = Get<int>(j, "round", "round");
  const auto seats = static_cast<std::size_t>(n);
  r.actions.resize(seats);
  r.payoffs.resize(seats);
  r.traces.resize(seats);
  r.retries.assign(seats, 0);
  r.fallback.assign(seats, false);
  for (std::size_t i = 0; i < seats; ++i) {
    const std::string key = SeatKey(i);
    r.actions[i] = ParseActionLabel(j.at("actions").at(key).get<std::string>());
    r.payoffs[i] = Points::FromDouble(j.at("payoffs").at(key).get<double>());
    if (j.contains("traces") && j["traces"].is_object() && j["traces"].contains(key) &&
        j["traces"][key].is_string()) {
      r.traces[i] = j["traces"][key].get<std::string>();
    }
    if (j.contains("retries")) r.retries[i] = j["retries"].value(key, 0);
    if (j.contains("fallback")) r.fallback[i] = j["fallback"].value(key, false);
  }
  return r;
}

}  // namespace detail

using namespace detail;

std::string MatchConfigToJson(const MatchConfig& cfg) { return ConfigToJson(cfg).dump(); }

MatchConfig MatchConfigFromJson(std::string_view text) {
  return ConfigFromJson(ParseJson(text, "match config"));
}

std::string RoundRecordToJson(const RoundRecord& r) {
  ordered_json j;
  j["round"] = r.round;
  j["actions"] = PerSeat(r.actions, [](Action a) { return std::string(ActionLabel(a)); });
  j["payoffs"] = PerSeat(r.payoffs, [](Points p) { return p.value(); });
  bool any_trace = false;
  for (const auto& t : r.traces) any_trace = any_trace || t.has_value();
  if (any_trace) {
    j["traces"] = PerSeat(r.traces, [](const std::optional<std::string>& t) {
      return t ? ordered_json(*t) : ordered_json(nullptr);
    });
  } else {
    j["traces"] = nullptr;
  }
  j["retries"] = PerSeat(r.retries, [](int v) { return v; });
  bool any_fallback = false;
  for (bool f : r.fallback) any_fallback = any_fallback || f;
  if (any_fallback) j["fallback"] = PerSeat(r.fallback, [](bool f) { return f; });
  return j.dump();
}

std::string RunLogToJsonl(const RunLog& log) {
  std::string out;
  ordered_json header;
  header["type"] = "header";
  header["schema_version"] = kSchemaVersion;
  header["meta"] = {{"run_id", log.meta.run_id},
                    {"setting", log.meta.setting},
                    {"seed_index", log.meta.seed_index}};
  header["config"] = ConfigToJson(log.config);
  out += header.dump();
  out += '\n';
  for (const RoundRecord& r : log.records) {
    out += RoundRecordToJson(r);
    out += '\n';
  }
  ordered_json term;
  term["kind"] = TerminationKindName(log.termination.kind);
  term["round"] = log.termination.round;
  if (!log.termination.reason.empty()) term["reason"] = log.termination.reason;
  ordered_json footer;
  footer["type"] = "footer";
  footer["termination"] = term;
  out += footer.dump();
  out += '\n';
  return out;
}

RunLog RunLogFromJsonl(std::string_view text) try {
  RunLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false;
  bool have_footer = false;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (have_footer) throw Error(ErrorCode::kIoError, "content after run-log footer");
    const json j = ParseJson(line, "run log");
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "header") throw Error(ErrorCode::kIoError, "run log must start with a header");
      if (j.value("schema_version", 0) != kSchemaVersion) {
        throw Error(ErrorCode::kIoError, "unsupported run-log schema version");
      }
      const json& meta = j.at("meta");
      log.meta.run_id = meta.value("run_id", "");
      log.meta.setting = meta.value("setting", "");
      log.meta.seed_index = meta.value("seed_index", 0);
      log.config = ConfigFromJson(j.at("config"));
      n = GetGame(log.config.game).n_players;
      have_header = true;
    } else if (type == "footer") {
      const json& term = j.at("termination");
      const std::string kind = term.value("kind", "");
      if (kind == "horizon_reached") {
        log.termination.kind = Termination::Kind::kHorizonReached;
      } else if (kind == "geometric_stop") {
        log.termination.kind = Termination::Kind::kGeometricStop;
      } else if (kind == "aborted") {
        log.termination.kind = Termination::Kind::kAborted;
      } else {
        throw Error(ErrorCode::kIoError, "unknown termination kind '" + kind + "'");
      }
      log.termination.round = term.value("round", 0);
      log.termination.reason = term.value("reason", "");
      have_footer = true;
    } else {
      log.records.push_back(RoundFromJson(j, n));
      if (log.records.back().round != static_cast<int>(log.records.size())) {
        throw Error(ErrorCode::kIoError, "run-log rounds are not contiguous from 1");
      }
    }
  }
  if (!have_header) throw Error(ErrorCode::kIoError, "empty run log");
  if (!have_footer) throw Error(ErrorCode::kIoError, "run log is truncated (no footer)");
  return log;
} catch (const nlohmann::json::exception& e) {
  throw Error(ErrorCode::kIoError, std::string("malformed run log: ") + e.what());
}

}  // namespace dilemma
