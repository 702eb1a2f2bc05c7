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

#ifndef NARRMEM_LLM_GATEWAY_HPP_
#define NARRMEM_LLM_GATEWAY_HPP_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/llm/prompt.hpp"
#include "narrmem/llm/provider.hpp"

namespace narrmem {

enum class GatewayMode { kLive, kReplay, kRecord };

std::string to_string(GatewayMode mode);
GatewayMode parse_gateway_mode(const std::string &s);  // INVALID_MODE

struct Fixture {
  std::string fingerprint;
  std::string template_id;
  int version = 1;
  std::string rendered_text;
  std::string raw_text;
  nlohmann::json parsed;
};

void to_json(nlohmann::json &j, const Fixture &f);
void from_json(const nlohmann::json &j, Fixture &f);

// Replay cache: one `<fingerprint>.json` file per recorded response. Reads
// share a lock; writes are serialized.
class FixtureStore {
 public:
  // In-memory only.
  FixtureStore() = default;
  // Loads every *.json file in `dir` (created if missing).
  explicit FixtureStore(std::filesystem::path dir);

  std::optional<Fixture> find(const std::string &fingerprint) const;
  void put(const Fixture &fixture);
  std::vector<Fixture> all() const;  // sorted by fingerprint
  size_t size() const;

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Fixture> fixtures_;
};

// Pulls a JSON object out of a model reply: tolerates code fences and
// leading/trailing prose. nullopt when nothing parses.
std::optional<nlohmann::json> extract_json(const std::string &raw);

struct StructuredResult {
  nlohmann::json parsed;
  std::string fingerprint;
  std::string raw_text;
  int retries = 0;
  bool from_fixture = false;
};

struct GatewayStats {
  size_t requests = 0;
  size_t fixture_hits = 0;
  size_t provider_calls = 0;
  size_t retries = 0;
};

// Observes every completed request, e.g. to assert on prompt contents.
using RequestObserver = std::function<void(const LlmRequest &, const StructuredResult &)>;

class LlmGateway {
 public:
  struct Options {
    GatewayMode mode = GatewayMode::kReplay;
    int max_retries = 2;
    double temperature = 0.0;
    int max_tokens = 2048;
  };

  // `provider` may be null in replay mode. `fixtures` may be null in live mode.
  LlmGateway(PromptCatalog catalog, std::shared_ptr<ChatProvider> provider,
             std::shared_ptr<FixtureStore> fixtures, Options options);

  const PromptCatalog &catalog() const { return catalog_; }
  GatewayMode mode() const { return options_.mode; }

  std::string render_prompt(const std::string &template_id, const PromptVariables &variables) const;

  // Errors: UNKNOWN_TEMPLATE, MISSING_VARIABLE, UNUSED_VARIABLE, REPLAY_MISS,
  // SCHEMA_VIOLATION, UNAVAILABLE, TRANSPORT_ERROR.
  StructuredResult complete_structured(const std::string &template_id,
                                       const PromptVariables &variables,
                                       std::optional<GatewayMode> mode = std::nullopt);

  GatewayStats stats() const;
  void set_observer(RequestObserver observer);

 private:
  StructuredResult call_provider(const PromptTemplate &tmpl, const LlmRequest &request);

  PromptCatalog catalog_;
  std::shared_ptr<ChatProvider> provider_;
  std::shared_ptr<FixtureStore> fixtures_;
  Options options_;
  std::atomic<size_t> requests_{0}, fixture_hits_{0}, provider_calls_{0}, retries_{0};
  std::mutex observer_mu_;
  RequestObserver observer_;
};

}  // namespace narrmem

#endif  // NARRMEM_LLM_GATEWAY_HPP_
