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

#include "narrmem/llm/gateway.hpp"

#include <fstream>

#include "narrmem/core/error.hpp"
#include "narrmem/core/text.hpp"
#include "narrmem/llm/schema.hpp"

namespace narrmem {

std::string to_string(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::kLive: return "live";
    case GatewayMode::kReplay: return "replay";
    case GatewayMode::kRecord: return "record";
  }
  return "replay";
}

GatewayMode parse_gateway_mode(const std::string &s) {
  const std::string m = text::to_lower(text::trim(s));
  if (m == "live") return GatewayMode::kLive;
  if (m == "replay") return GatewayMode::kReplay;
  if (m == "record") return GatewayMode::kRecord;
  throw Error("INVALID_MODE", "unknown gateway mode '" + s + "' (live, replay, record)");
}

void to_json(nlohmann::json &j, const Fixture &f) {
  j = {{"fingerprint", f.fingerprint}, {"template_id", f.template_id},
       {"version", f.version},         {"rendered_text", f.rendered_text},
       {"raw_text", f.raw_text},       {"parsed", f.parsed}};
}

void from_json(const nlohmann::json &j, Fixture &f) {
  f.fingerprint = j.at("fingerprint").get<std::string>();
  f.template_id = j.at("template_id").get<std::string>();
  f.version = j.at("version").get<int>();
  f.rendered_text = j.at("rendered_text").get<std::string>();
  f.raw_text = j.value("raw_text", "");
  f.parsed = j.at("parsed");
}

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  namespace fs = std::filesystem;
  fs::create_directories(*dir_);
  for (const auto &entry : fs::directory_iterator(*dir_)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    try {
      Fixture f = nlohmann::json::parse(in).get<Fixture>();
      fixtures_[f.fingerprint] = std::move(f);
    } catch (const nlohmann::json::exception &e) {
      throw Error("IO_ERROR", "malformed fixture " + entry.path().string() + ": " + e.what());
    }
  }
}

std::optional<Fixture> FixtureStore::find(const std::string &fingerprint) const {
  std::shared_lock lock(mu_);
  auto it = fixtures_.find(fingerprint);
  if (it == fixtures_.end()) return std::nullopt;
  return it->second;
}

void FixtureStore::put(const Fixture &fixture) {
  std::unique_lock lock(mu_);
  fixtures_[fixture.fingerprint] = fixture;
  if (!dir_) return;
  auto path = *dir_ / (fixture.fingerprint + ".json");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IO_ERROR", "cannot write " + tmp.string());
    out << nlohmann::json(fixture).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Fixture> FixtureStore::all() const {
  std::shared_lock lock(mu_);
  std::vector<Fixture> out;
  for (const auto &[fp, f] : fixtures_) out.push_back(f);
  return out;
}

size_t FixtureStore::size() const {
  std::shared_lock lock(mu_);
  return fixtures_.size();
}

std::optional<nlohmann::json> extract_json(const std::string &raw) {
  auto attempt = [](const std::string &s) -> std::optional<nlohmann::json> {
    auto j = nlohmann::json::parse(s, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  };
  std::string body = text::trim(raw);
  if (auto j = attempt(body)) return j;
  // Fenced block, possibly with a language tag.
  if (auto open = body.find("```"); open != std::string::npos) {
    auto start = body.find('\n', open);
    auto close = body.find("```", open + 3);
    if (start != std::string::npos && close != std::string::npos && close > start)
      if (auto j = attempt(body.substr(start + 1, close - start - 1))) return j;
  }
  auto first = body.find('{');
  auto last = body.rfind('}');
  if (first != std::string::npos && last != std::string::npos && last > first)
    return attempt(body.substr(first, last - first + 1));
  return std::nullopt;
}

LlmGateway::LlmGateway(PromptCatalog catalog, std::shared_ptr<ChatProvider> provider,
                       std::shared_ptr<FixtureStore> fixtures, Options options)
    : catalog_(std::move(catalog)),
      provider_(std::move(provider)),
      fixtures_(std::move(fixtures)),
      options_(options) {}

std::string LlmGateway::render_prompt(const std::string &template_id,
                                      const PromptVariables &variables) const {
  return catalog_.render(template_id, variables);
}

StructuredResult LlmGateway::call_provider(const PromptTemplate &tmpl, const LlmRequest &request) {
  if (!provider_)
    throw Error("UNAVAILABLE", "no chat provider configured for " + tmpl.template_id);
  StructuredResult result;
  result.fingerprint = request_fingerprint(request);
  LlmRequest attempt = request;
  std::string problem;
  for (int i = 0; i <= options_.max_retries; ++i) {
    ++provider_calls_;
    LlmResponse resp = provider_->complete(attempt);
    auto parsed = resp.parsed.is_null() ? extract_json(resp.raw_text) : std::optional(resp.parsed);
    if (!parsed) {
      problem = "reply is not valid JSON";
    } else if (auto err = validate_schema(*parsed, tmpl.response_schema)) {
      problem = *err;
    } else {
      result.parsed = std::move(*parsed);
      result.raw_text = resp.raw_text;
      result.retries = i;
      retries_ += static_cast<size_t>(i);
      return result;
    }
    attempt.rendered_text = request.rendered_text +
                            "\n\nYour previous reply was rejected (" + problem +
                            "). Reply again with a single JSON object that follows the required "
                            "format exactly.";
  }
  retries_ += static_cast<size_t>(options_.max_retries);
  throw Error("SCHEMA_VIOLATION", tmpl.template_id + " after " +
                                      std::to_string(options_.max_retries) + " retries: " + problem);
}

StructuredResult LlmGateway::complete_structured(const std::string &template_id,
                                                 const PromptVariables &variables,
                                                 std::optional<GatewayMode> mode) {
  const GatewayMode m = mode.value_or(options_.mode);
  const PromptTemplate &tmpl = catalog_.get(template_id);
  LlmRequest request;
  request.template_id = template_id;
  request.version = tmpl.version;
  request.rendered_text = render_template(tmpl, variables);
  request.temperature = options_.temperature;
  request.max_tokens = options_.max_tokens;
  const std::string fp = request_fingerprint(request);
  ++requests_;

  StructuredResult result;
  std::optional<Fixture> hit;
  if (m != GatewayMode::kLive) {
    if (!fixtures_) throw Error("UNAVAILABLE", "no fixture store configured");
    hit = fixtures_->find(fp);
  }
  if (hit) {
    if (auto err = validate_schema(hit->parsed, tmpl.response_schema))
      throw Error("SCHEMA_VIOLATION", "fixture " + fp + " for " + template_id + ": " + *err);
    ++fixture_hits_;
    result.parsed = hit->parsed;
    result.raw_text = hit->raw_text;
    result.fingerprint = fp;
    result.from_fixture = true;
  } else if (m == GatewayMode::kReplay) {
    throw Error("REPLAY_MISS", "no fixture for fingerprint " + fp + " (template " + template_id + ")");
  } else {
    result = call_provider(tmpl, request);
    if (m == GatewayMode::kRecord) {
      Fixture f{fp, template_id, tmpl.version, request.rendered_text, result.raw_text, result.parsed};
      fixtures_->put(f);
    }
  }

  RequestObserver observer;
  {
    std::lock_guard lock(observer_mu_);
    observer = observer_;
  }
  if (observer) observer(request, result);
  return result;
}

GatewayStats LlmGateway::stats() const {
  return {requests_.load(), fixture_hits_.load(), provider_calls_.load(), retries_.load()};
}

void LlmGateway::set_observer(RequestObserver observer) {
  std::lock_guard lock(observer_mu_);
  observer_ = std::move(observer);
}

}  // namespace narrmem
