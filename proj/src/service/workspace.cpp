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


#include "narrmem/service/workspace.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>

#include "narrmem/core/error.hpp"
#include "narrmem/ingest/entities.hpp"
#include "narrmem/ingest/preprocess.hpp"
#include "narrmem/llm/embedding.hpp"
#include "narrmem/llm/provider.hpp"

namespace narrmem {

using nlohmann::json;
namespace fs = std::filesystem;

Workspace::Workspace(const ApiConfig &config) : config_(config.resolved()) {
  config_.validate();
  std::error_code ec;
  fs::create_directories(config_.workspace, ec);
  if (ec) throw Error("IO_ERROR", "cannot create workspace " + config_.workspace.string());
  fs::create_directories(config_.db_path.parent_path().empty() ? "." : config_.db_path.parent_path());
  if (std::getenv("NARRMEM_EMBED_BASE_URL"))
    embedder_ = HttpEmbeddingProvider::from_env();
  else
    embedder_ = std::make_unique<HashedNgramEmbedder>(config_.embedding_dim);
  stores_ = std::make_unique<MemoryStores>(config_.db_path, config_.vectors_base,
                                           embedder_->dimension());
  fixtures_ = std::make_shared<FixtureStore>(config_.fixtures_dir);
}

Workspace::~Workspace() {
  try {
    stores_->flush();
  } catch (...) {
    // Destructors stay quiet; explicit flush() reports errors.
  }
}

LlmGateway &Workspace::gateway(std::optional<GatewayMode> mode) {
  GatewayMode m = mode.value_or(config_.mode);
  std::lock_guard lock(gateways_mu_);
  auto it = gateways_.find(m);
  if (it != gateways_.end()) return *it->second;
  std::shared_ptr<ChatProvider> provider;
  if (m != GatewayMode::kReplay) {
    if (!config_.script_path.empty())
      provider = ScriptedChatProvider::from_file(config_.script_path);
    else
      provider = HttpChatProvider::from_env();
  }
  LlmGateway::Options opt;
  opt.mode = m;
  auto gw = std::make_unique<LlmGateway>(PromptCatalog::load(config_.prompts_dir), provider,
                                         fixtures_, opt);
  return *gateways_.emplace(m, std::move(gw)).first->second;
}

PipelineContext Workspace::pipeline_context(std::optional<GatewayMode> mode) {
  return PipelineContext{*stores_, gateway(mode), *embedder_, config_.pipeline};
}

fs::path Workspace::document_path(const SeriesId &series, const EpisodeKey &episode) const {
  return config_.workspace / "docs" / series.str() / (episode.str() + ".json");
}

std::optional<EpisodeDocument> Workspace::find_document(const SeriesId &series,
                                                        const EpisodeKey &episode) const {
  auto p = document_path(series, episode);
  if (!fs::exists(p)) return std::nullopt;
  return load_document(p);
}

std::vector<EpisodeDocument> Workspace::documents(const SeriesId &series,
                                                  std::optional<int> season) const {
  std::vector<EpisodeDocument> out;
  fs::path dir = config_.workspace / "docs" / series.str();
  if (!fs::exists(dir)) return out;
  for (const auto &e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    auto doc = load_document(e.path());
    if (season && doc.episode.season != *season) continue;
    out.push_back(std::move(doc));
  }
  std::sort(out.begin(), out.end(), [](const EpisodeDocument &a, const EpisodeDocument &b) {
    return a.episode < b.episode;
  });
  return out;
}

void Workspace::save_document(const EpisodeDocument &doc) const {
  narrmem::save_document(doc, document_path(doc.series, doc.episode));
}

std::vector<EpisodeDocument> Workspace::ingest(const fs::path &dir, const SeriesId &series) {
  if (!fs::is_directory(dir)) throw Error("IO_ERROR", dir.string() + " is not a directory");
  static const std::regex kPlot(R"(^[Ss]\d+[Ee]\d+.*\.txt$)");
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && std::regex_match(e.path().filename().string(), kPlot))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<EpisodeDocument> out;
  for (const auto &f : files) {
    auto doc = load_episode(f, series);
    if (auto prior = find_document(series, doc.episode); prior && prior->raw_text == doc.raw_text) {
      prior->source_path = doc.source_path;
      doc = *prior;
    }
    save_document(doc);
    out.push_back(std::move(doc));
  }
  std::sort(out.begin(), out.end(), [](const EpisodeDocument &a, const EpisodeDocument &b) {
    return a.episode < b.episode;
  });
  return out;
}

std::vector<EpisodeDocument> Workspace::preprocess(const SeriesId &series,
                                                   std::optional<int> season,
                                                   std::optional<GatewayMode> mode, bool force) {
  auto docs = documents(series, season);
  LlmGateway &gw = gateway(mode);
  CapitalizationMentionExtractor heuristic;
  LlmMentionExtractor llm(gw);
  MentionExtractor &extractor =
      config_.ner == "llm" ? static_cast<MentionExtractor &>(llm) : heuristic;
  PreprocessOptions opt;
  opt.window = config_.pronoun_window;
  opt.chunk = config_.simplify_chunk;
  opt.force = force;
  for (auto &doc : docs) {
    doc = preprocess_episode(doc, gw, stores_->relational(), extractor, opt);
    save_document(doc);
  }
  return docs;
}

std::vector<EpisodeExtractionResult> Workspace::extract(const SeriesId &series, int season,
                                                        std::optional<GatewayMode> mode,
                                                        bool force, const EventSink &on_event) {
  auto docs = documents(series, season);
  if (docs.empty())
    throw Error("UNKNOWN_EPISODE", "no staged documents for " + series.str() + " season " +
                                       std::to_string(season));
  auto ctx = pipeline_context(mode);
  RunOptions opt;
  opt.force = force;
  opt.checkpoint_dir = config_.runs_dir;
  opt.on_event = on_event;
  std::vector<EpisodeExtractionResult> out;
  for (const auto &doc : docs) out.push_back(run_episode(ctx, doc, opt));
  stores_->flush();
  return out;
}

json Workspace::export_json() const {
  const auto &rel = stores_->relational();
  json series_list = json::array();
  auto all = rel.list_series();
  std::sort(all.begin(), all.end());
  for (const auto &s : all) {
    auto chars = rel.list_characters(s);
    std::sort(chars.begin(), chars.end(), [](const Character &a, const Character &b) {
      return a.character_id < b.character_id;
    });
    auto arcs = rel.list_arcs(s);
    std::sort(arcs.begin(), arcs.end(), [](const NarrativeArc &a, const NarrativeArc &b) {
      return std::tie(a.title, a.arc_id) < std::tie(b.title, b.arc_id);
    });
    series_list.push_back({{"series", s}, {"characters", chars}, {"arcs", arcs}});
  }
  return json{{"format", "narrmem-export/1"}, {"series", series_list}};
}

std::string Workspace::export_text() const { return export_json().dump(2) + "\n"; }

EvalReport Workspace::evaluate(const GoldStandard &gold,
                               const std::vector<MappingOverride> &extra_overrides) {
  ArcFilter f;
  f.season = gold.season;
  auto arcs = stores_->relational().list_arcs(gold.series, f);
  auto overrides = gold.mapping_overrides;
  overrides.insert(overrides.end(), extra_overrides.begin(), extra_overrides.end());
  auto m = match_arcs(arcs, gold.gold_arcs, overrides, *embedder_);
  return compute_report(m, arcs, gold.gold_arcs, stores_->relational().list_characters(gold.series),
                        gold.gold_characters);
}

}  // namespace narrmem
