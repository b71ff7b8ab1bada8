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

#include "dilemma/llm_client.h"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <semaphore>
#include <thread>

#include "dilemma/error.h"
#include "httplib.h"
#include "json.hpp"

namespace dilemma {

using ordered_json = nlohmann::ordered_json;

void CompletionRequest::Validate() const {
  if (temperature < 0) throw Error(ErrorCode::kConfigError, "temperature must be >= 0");
  if (max_tokens < 1) throw Error(ErrorCode::kConfigError, "max_tokens must be >= 1");
  if (messages.empty()) throw Error(ErrorCode::kConfigError, "request has no messages");
}

CompletionResult ChatClient::JudgeComplete(CompletionRequest request) {
  request.temperature = 0.0;
  return Complete(request);
}

void EndpointConfig::Validate() const {
  if (base_url.empty()) throw Error(ErrorCode::kConfigError, "endpoint base_url is empty");
  if (api_key_env.empty()) throw Error(ErrorCode::kConfigError, "endpoint api_key_env is empty");
  if (max_concurrent < 1) throw Error(ErrorCode::kConfigError, "max_concurrent must be >= 1");
  if (retry.max_attempts < 1) throw Error(ErrorCode::kConfigError, "max_attempts must be >= 1");
}

std::string SerializeRequestBody(const CompletionRequest& request) {
  ordered_json body;
  body["model"] = request.model_name;
  body["messages"] = ordered_json::array();
  for (const ChatMessage& m : request.messages) {
    ordered_json msg;
    msg["role"] = m.role;
    msg["content"] = m.content;
    body["messages"].push_back(std::move(msg));
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

std::string ExtractContent(std::string_view response_body) {
  auto parsed = nlohmann::json::parse(response_body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) throw Error(ErrorCode::kTransportError, "response is not JSON");
  if (!parsed.contains("choices") || !parsed["choices"].is_array() || parsed["choices"].empty()) {
    throw Error(ErrorCode::kTransportError, "response has no choices");
  }
  const auto* content = &parsed["choices"][0];
  if (!content->contains("message") || !(*content)["message"].contains("content") ||
      !(*content)["message"]["content"].is_string()) {
    throw Error(ErrorCode::kTransportError, "response choice has no message content");
  }
  return (*content)["message"]["content"].get<std::string>();
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/' and has no trailing '/'
};

ParsedUrl SplitUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigError, "base_url must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  out.path += "/chat/completions";
  return out;
}

bool Retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

struct HttpChatClient::Impl {
  EndpointConfig config;
  LogSink log;
  std::string api_key;
  ParsedUrl url;
  std::counting_semaphore<> admission;

  mutable std::mutex mu;
  ClientStats stats;
  int in_flight = 0;

  Impl(EndpointConfig cfg, LogSink sink)
      : config(std::move(cfg)), log(std::move(sink)), admission(config.max_concurrent) {}

  void Log(const std::string& line) const {
    if (log) log(line);
  }

  struct AttemptOutcome {
    int status = 0;  // 0 for transport-level failure
    std::string body;
    std::string transport_error;
  };

  AttemptOutcome Attempt(const std::string& body) const {
    httplib::Client cli(url.origin);
    const auto timeout = config.timeout;
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                               static_cast<time_t>((timeout.count() % 1000) * 1000));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                         static_cast<time_t>((timeout.count() % 1000) * 1000));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                          static_cast<time_t>((timeout.count() % 1000) * 1000));
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key}};
    auto res = cli.Post(url.path, headers, body, "application/json");
    AttemptOutcome out;
    if (!res) {
      out.transport_error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

HttpChatClient::HttpChatClient(EndpointConfig config, LogSink log) {
  config.Validate();
  impl_ = std::make_unique<Impl>(std::move(config), std::move(log));
  const char* key = std::getenv(impl_->config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::kConfigError,
                "API key environment variable " + impl_->config.api_key_env + " is not set");
  }
  impl_->api_key = key;
  impl_->url = SplitUrl(impl_->config.base_url);
}

HttpChatClient::~HttpChatClient() = default;

const EndpointConfig& HttpChatClient::config() const { return impl_->config; }

ClientStats HttpChatClient::stats() const {
  std::lock_guard lock(impl_->mu);
  return impl_->stats;
}

CompletionResult HttpChatClient::Complete(const CompletionRequest& request) {
  request.Validate();
  Impl& s = *impl_;
  const std::string body = SerializeRequestBody(request);

  s.admission.acquire();
  {
    std::lock_guard lock(s.mu);
    ++s.stats.requests;
    ++s.in_flight;
    s.stats.peak_in_flight = std::max(s.stats.peak_in_flight, s.in_flight);
  }
  struct Release {
    Impl& s;
    ~Release() {
      {
        std::lock_guard lock(s.mu);
        --s.in_flight;
      }
      s.admission.release();
    }
  } release{s};

  const auto started = std::chrono::steady_clock::now();
  std::string last_problem;
  for (int attempt = 1; attempt <= s.config.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      const std::chrono::milliseconds delay = std::min<std::chrono::milliseconds>(
          s.config.retry.backoff_base * (1LL << std::min(attempt - 2, 20)),
          s.config.retry.backoff_cap);
      std::this_thread::sleep_for(delay);
    }
    {
      std::lock_guard lock(s.mu);
      ++s.stats.attempts;
      if (attempt > 1) ++s.stats.retries;
    }
    Impl::AttemptOutcome out = s.Attempt(body);
    s.Log("chat.completions model=" + request.model_name + " attempt=" + std::to_string(attempt) +
          " status=" + (out.status ? std::to_string(out.status) : out.transport_error));

    if (out.status == 200) {
      CompletionResult result;
      result.content = ExtractContent(out.body);
      result.retries = attempt - 1;
      result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      auto parsed = nlohmann::json::parse(out.body, nullptr, false);
      if (parsed.contains("usage") && parsed["usage"].is_object()) {
        TokenUsage usage;
        usage.prompt_tokens = parsed["usage"].value("prompt_tokens", std::int64_t{0});
        usage.completion_tokens = parsed["usage"].value("completion_tokens", std::int64_t{0});
        result.usage = usage;
      }
      std::lock_guard lock(s.mu);
      s.stats.latency_ms += result.latency.count();
      if (result.usage) {
        s.stats.prompt_tokens += result.usage->prompt_tokens;
        s.stats.completion_tokens += result.usage->completion_tokens;
      }
      return result;
    }
    if (out.status != 0 && !Retryable(out.status)) {
      {
        std::lock_guard lock(s.mu);
        ++s.stats.failures;
      }
      throw Error(ErrorCode::kConfigError,
                  "endpoint rejected request with HTTP " + std::to_string(out.status));
    }
    last_problem = out.status ? "HTTP " + std::to_string(out.status) : out.transport_error;
  }
  {
    std::lock_guard lock(s.mu);
    ++s.stats.failures;
  }
  throw Error(ErrorCode::kTransportError, "giving up after " +
                                              std::to_string(s.config.retry.max_attempts) +
                                              " attempts (last: " + last_problem + ")");
}

}  // namespace dilemma
