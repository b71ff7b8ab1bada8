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

// Internal JSON helpers shared by the run-log reader and the plan parser.

#ifndef DILEMMA_SRC_JSON_DETAIL_H_
#define DILEMMA_SRC_JSON_DETAIL_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "dilemma/engine.h"
#include "dilemma/error.h"
#include "json.hpp"

namespace dilemma::detail {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

inline void RequireKnownKeys(const json& obj, std::initializer_list<std::string_view> allowed,
                      std::string_view where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kConfigError, std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) {
      throw Error(ErrorCode::kConfigError,
                  "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
inline T Get(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) {
    throw Error(ErrorCode::kConfigError,
                "missing key '" + std::string(key) + "' in " + std::string(where));
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                "bad value for '" + std::string(key) + "' in " + std::string(where));
  }
}

template <typename T>
inline T GetOr(const json& obj, const char* key, T fallback, std::string_view where) {
  return obj.contains(key) ? Get<T>(obj, key, where) : fallback;
}

ordered_json BindingToJson(const AgentBinding& b);
// A bare string is shorthand for a scripted binding with that strategy.
AgentBinding BindingFromJson(const json& j);
ordered_json HorizonToJson(const Horizon& h);
Horizon HorizonFromJson(const json& j);
ordered_json SanitizationToJson(const SanitizationConfig& s);
SanitizationConfig SanitizationFromJson(const json& j);
ordered_json ConfigToJson(const MatchConfig& cfg);
MatchConfig ConfigFromJson(const json& j);
// Throws ConfigError naming `what` on a syntax error.
json ParseJson(std::string_view text, std::string_view what);

}  // namespace dilemma::detail

#endif  // DILEMMA_SRC_JSON_DETAIL_H_
