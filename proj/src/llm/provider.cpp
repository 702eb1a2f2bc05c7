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

#include "narrmem/llm/provider.hpp"

#include <cstdlib>
#include <fstream>

#include "httplib.h"
#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/core/text.hpp"

namespace narrmem {

std::string request_fingerprint(const std::string &template_id, int version,
                                const std::string &rendered_text) {
  std::string material = template_id;
  material += '\n';
  material += std::to_string(version);
  material += '\n';
  material += rendered_text;
  return sha256_hex(material);
}

LlmResponse FunctionChatProvider::complete(const LlmRequest &request) {
  ++calls_;
  LlmResponse r;
  r.raw_text = fn_(request);
  r.provider_meta = {{"provider", name_}};
  return r;
}

namespace {

std::string env_or(const char *name, const std::string &fallback = "") {
  const char *v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

HttpChatProvider::HttpChatProvider(std::string base_url, std::string api_key, std::string model)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), model_(std::move(model)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::unique_ptr<HttpChatProvider> HttpChatProvider::from_env() {
  std::string base = env_or("NARRMEM_LLM_BASE_URL");
  std::string model = env_or("NARRMEM_LLM_MODEL");
  if (base.empty() || model.empty())
    throw Error("UNAVAILABLE", "NARRMEM_LLM_BASE_URL and NARRMEM_LLM_MODEL must be set for live mode");
  return std::make_unique<HttpChatProvider>(base, env_or("NARRMEM_LLM_API_KEY"), model);
}

LlmResponse HttpChatProvider::complete(const LlmRequest &request) {
  nlohmann::json body = {
      {"model", model_},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
      {"response_format", {{"type", "json_object"}}},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.rendered_text}}})},
  };
  httplib::Client client(base_url_);
  client.set_connection_timeout(10);
  client.set_read_timeout(180);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw Error("TRANSPORT_ERROR", "chat request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error("TRANSPORT_ERROR", "chat endpoint returned HTTP " + std::to_string(res->status));
  LlmResponse out;
  try {
    auto j = nlohmann::json::parse(res->body);
    out.raw_text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    out.provider_meta = {{"provider", name()}};
    if (j.contains("usage")) out.provider_meta["usage"] = j["usage"];
  } catch (const nlohmann::json::exception &e) {
    throw Error("TRANSPORT_ERROR", std::string("unexpected chat response: ") + e.what());
  }
  return out;
}

ScriptedChatProvider::ScriptedChatProvider(nlohmann::json rules) : rules_(std::move(rules)) {
  if (!rules_.contains("rules") || !rules_["rules"].is_array())
    throw Error("IO_ERROR", "script must hold a \"rules\" array");
}

std::unique_ptr<ScriptedChatProvider> ScriptedChatProvider::from_file(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("IO_ERROR", "cannot read script " + path.string());
  try {
    return std::make_unique<ScriptedChatProvider>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception &e) {
    throw Error("IO_ERROR", "malformed script " + path.string() + ": " + e.what());
  }
}

LlmResponse ScriptedChatProvider::complete(const LlmRequest &request) {
  const std::string &prompt = request.rendered_text;
  for (const auto &rule : rules_["rules"]) {
    if (rule.value("template", "") != request.template_id) continue;
    bool all = true;
    for (const auto &needle : rule.value("contains", nlohmann::json::array()))
      all = all && prompt.find(needle.get<std::string>()) != std::string::npos;
    if (!all) continue;

    LlmResponse out;
    out.provider_meta = {{"provider", "scripted"}};
    if (rule.contains("echo_after")) {
      const std::string marker = rule["echo_after"].get<std::string>();
      auto pos = prompt.find(marker);
      if (pos == std::string::npos) continue;
      pos += marker.size();
      auto end = prompt.find('\n', pos);
      out.raw_text = text::trim(prompt.substr(pos, end == std::string::npos ? end : end - pos));
    } else {
      const auto &resp = rule.at("response");
      out.raw_text = resp.is_string() ? resp.get<std::string>() : resp.dump();
    }
    return out;
  }
  std::string excerpt = prompt.substr(0, std::min<size_t>(prompt.size(), 160));
  throw Error("SCRIPT_NO_RULE", "no scripted response for " + request.template_id + ": " + excerpt);
}

}  // namespace narrmem
