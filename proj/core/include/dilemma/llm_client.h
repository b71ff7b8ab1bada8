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

#ifndef DILEMMA_LLM_CLIENT_H_
#define DILEMMA_LLM_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dilemma {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct CompletionRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 2000;

  // Throws ConfigError on temperature < 0, max_tokens < 1 or no messages.
  void Validate() const;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct CompletionResult {
  std::string content;
  std::chrono::milliseconds latency{0};
  std::optional<TokenUsage> usage;
  int retries = 0;
};

// Anything that can answer a chat-completions request. The HTTP client is
// the production implementation; tests substitute scripted fakes.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual CompletionResult Complete(const CompletionRequest& request) = 0;

  // Same as Complete with temperature pinned to 0.
  CompletionResult JudgeComplete(CompletionRequest request);
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{30000};
};

struct EndpointConfig {
  std::string base_url;     // e.g. "https://host/v1"; "/chat/completions" is appended
  std::string api_key_env;  // name of the environment variable holding the key
  int max_concurrent = 4;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{60000};

  void Validate() const;
};

using LogSink = std::function<void(std::string_view line)>;

struct ClientStats {
  std::int64_t requests = 0;
  std::int64_t attempts = 0;
  std::int64_t retries = 0;
  std::int64_t failures = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  int peak_in_flight = 0;
};

// Request body for POST /chat/completions. Key order is fixed
// (model, messages, temperature, max_tokens), so identical requests
// serialize to identical bytes.
std::string SerializeRequestBody(const CompletionRequest& request);

// choices[0].message.content of a chat-completions response.
// Throws TransportError on a malformed body.
std::string ExtractContent(std::string_view response_body);

// OpenAI-compatible chat-completions client with an admission limiter,
// exponential backoff on 429/5xx/timeouts, and usage accounting.
// Shareable across threads.
class HttpChatClient final : public ChatClient {
 public:
  // Reads the API key from the environment immediately; throws
  // ConfigError when the variable is unset or empty.
  explicit HttpChatClient(EndpointConfig config, LogSink log = {});
  ~HttpChatClient() override;

  HttpChatClient(const HttpChatClient&) = delete;
  HttpChatClient& operator=(const HttpChatClient&) = delete;

  CompletionResult Complete(const CompletionRequest& request) override;

  ClientStats stats() const;
  const EndpointConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dilemma

#endif  // DILEMMA_LLM_CLIENT_H_
