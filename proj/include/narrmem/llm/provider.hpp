// Copyright 2026 The narrmem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NARRMEM_LLM_PROVIDER_HPP_
#define NARRMEM_LLM_PROVIDER_HPP_

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace narrmem {

struct LlmRequest {
  std::string template_id;
  int version = 1;
  std::string rendered_text;
  double temperature = 0.0;
  int max_tokens = 2048;
};

struct LlmResponse {
  std::string raw_text;
  nlohmann::json parsed;
  nlohmann::json provider_meta = nlohmann::json::object();
};

// hex sha256 over template_id, version and rendered_text.
std::string request_fingerprint(const std::string &template_id, int version,
                                const std::string &rendered_text);
inline std::string request_fingerprint(const LlmRequest &r) {
  return request_fingerprint(r.template_id, r.version, r.rendered_text);
}

// A chat-completion backend. Implementations must be safe to call from
// several threads. Failures throw Error("TRANSPORT_ERROR", ...).
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  // Returns raw text; `parsed` and `provider_meta` are optional.
  virtual LlmResponse complete(const LlmRequest &request) = 0;
};

// Wraps a callable. Handy for tests and for adapting other clients.
class FunctionChatProvider : public ChatProvider {
 public:
  using Fn = std::function<std::string(const LlmRequest &)>;
  explicit FunctionChatProvider(Fn fn, std::string name = "function")
      : fn_(std::move(fn)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  LlmResponse complete(const LlmRequest &request) override;
  size_t calls() const { return calls_.load(); }

 private:
  Fn fn_;
  std::string name_;
  std::atomic<size_t> calls_{0};
};

// OpenAI-compatible /v1/chat/completions client.
//   NARRMEM_LLM_BASE_URL  e.g. https://api.openai.com
//   NARRMEM_LLM_API_KEY   bearer token (optional for local servers)
//   NARRMEM_LLM_MODEL     model name
class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string api_key, std::string model);
  // UNAVAILABLE when NARRMEM_LLM_BASE_URL or NARRMEM_LLM_MODEL is unset.
  static std::unique_ptr<HttpChatProvider> from_env();

  std::string name() const override { return "http:" + model_; }
  LlmResponse complete(const LlmRequest &request) override;

 private:
  std::string base_url_;
  std::string api_key_;
  std::string model_;
};

// Deterministic offline provider driven by a rules file:
//
//   {"rules": [
//     {"template": "agent2_extract_anthology",
//      "contains": ["Mrs. Okafor"],
//      "response": {"arcs": [...]}},
//     {"template": "simplify_plot", "echo_after": "SENTENCES_JSON:"}
//   ]}
//
// The first rule whose template matches and whose "contains" strings all
// occur in the rendered prompt wins. "response" is returned verbatim (strings
// as-is, other JSON dumped). "echo_after" returns the JSON value that follows
// the marker on the same line. No match throws SCRIPT_NO_RULE.
class ScriptedChatProvider : public ChatProvider {
 public:
  explicit ScriptedChatProvider(nlohmann::json rules);
  static std::unique_ptr<ScriptedChatProvider> from_file(const std::filesystem::path &path);

  std::string name() const override { return "scripted"; }
  LlmResponse complete(const LlmRequest &request) override;

 private:
  nlohmann::json rules_;
};

}  // namespace narrmem

#endif  // NARRMEM_LLM_PROVIDER_HPP_
