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


#include "narrmem/service/curation.hpp"

#include <algorithm>
#include <set>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/core/text.hpp"
#include "narrmem/pipeline/agents.hpp"

namespace narrmem {

using nlohmann::json;

namespace {

std::string codes_of(const ValidationReport &r) { return text::join(violation_codes(r), ", "); }

void reject_unknown_fields(const json &body, std::initializer_list<const char *> allowed) {
  if (!body.is_object()) throw Error("BAD_REQUEST", "request body must be a JSON object");
  for (const auto &[k, v] : body.items()) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char *a) { return k == a; });
    if (!ok) throw Error("BAD_REQUEST", "unknown field '" + k + "'");
  }
}

std::vector<std::string> clean_content(const std::vector<std::string> &in) {
  std::vector<std::string> out;
  for (const auto &s : in) out.push_back(text::collapse_whitespace(s));
  return out;
}

}  // namespace

ValidationFailed::ValidationFailed(ValidationReport report)
    : Error("VALIDATION_FAILED", codes_of(report)), report_(std::move(report)) {}

void Curation::store_arc(const NarrativeArc &arc) {
  auto &rel = stores.relational();
  auto report = validate_arc(arc, [&](const std::string &id) {
    return rel.find_character(id).has_value();
  });
  if (!report.empty()) throw ValidationFailed(std::move(report));
  rel.save_arc(arc);
  // Drop every record of the arc first so removed progressions leave no
  // stale embeddings behind.
  stores.vectors().remove_arc(arc.arc_id);
  reembed_arc(stores, embedder, arc, embed_utterances);
}

json Curation::timeline(const SeriesId &series, int season, std::optional<ArcType> type,
                        std::optional<std::string> character_id) const {
  const auto &rel = stores.relational();
  ArcFilter f;
  f.season = season;
  f.arc_type = type;
  f.character_id = character_id;
  std::set<EpisodeKey> columns;
  for (const auto &e : rel.processed_episodes(series))
    if (e.season == season) columns.insert(e);
  json rows = json::array();
  std::set<std::string> char_ids;
  for (auto arc : rel.list_arcs(series, f)) {
    std::erase_if(arc.progressions, [&](const Progression &p) { return p.episode.season != season; });
    for (const auto &p : arc.progressions) {
      columns.insert(p.episode);
      char_ids.insert(p.interfering_characters.begin(), p.interfering_characters.end());
    }
    char_ids.insert(arc.main_characters.begin(), arc.main_characters.end());
    rows.push_back(arc);
  }
  json names = json::object();
  for (const auto &id : char_ids)
    if (auto c = rel.find_character(id)) names[id] = c->preferred_name;
  json cols = json::array();
  for (const auto &e : columns) cols.push_back(e.str());
  return json{{"series", series}, {"season", season}, {"episodes", cols}, {"arcs", rows},
              {"characters", names}};
}

NarrativeArc Curation::create_arc(const json &body) {
  reject_unknown_fields(body, {"series", "title", "description", "arc_type", "main_characters",
                               "progressions"});
  NarrativeArc arc;
  arc.series = body.at("series").get<SeriesId>();
  arc.title = text::collapse_whitespace(body.value("title", ""));
  arc.description = text::collapse_whitespace(body.value("description", ""));
  arc.arc_type = body.at("arc_type").get<ArcType>();
  arc.main_characters = body.value("main_characters", std::vector<std::string>{});
  std::string disc = "manual/" + arc.title;
  arc.arc_id = derive_id(IdKind::kArc, arc.series, disc);
  for (int n = 2; stores.relational().find_arc(arc.arc_id); ++n)
    arc.arc_id = derive_id(IdKind::kArc, arc.series, disc + "#" + std::to_string(n));
  for (const auto &pj : body.value("progressions", json::array())) {
    reject_unknown_fields(pj, {"episode", "content", "interfering_characters"});
    Progression p;
    p.episode = pj.at("episode").get<EpisodeKey>();
    p.progression_id = new_progression_id(arc, p.episode);
    p.arc_id = arc.arc_id;
    p.series = arc.series;
    p.content = Progression::make_content(clean_content(pj.at("content").get<std::vector<std::string>>()));
    p.interfering_characters = pj.value("interfering_characters", std::vector<std::string>{});
    arc.progressions.push_back(std::move(p));
  }
  if (arc.progressions.empty())
    throw Error("EMPTY_PROGRESSIONS", "a new arc needs at least one progression");
  arc.sort_progressions();
  store_arc(arc);
  return arc;
}

NarrativeArc Curation::patch_arc(const std::string &arc_id, const json &body) {
  reject_unknown_fields(body, {"title", "description", "arc_type", "main_characters"});
  NarrativeArc arc = stores.relational().load_arc(arc_id);
  if (body.contains("title")) arc.title = text::collapse_whitespace(body["title"].get<std::string>());
  if (body.contains("description"))
    arc.description = text::collapse_whitespace(body["description"].get<std::string>());
  if (body.contains("arc_type")) arc.arc_type = body["arc_type"].get<ArcType>();
  if (body.contains("main_characters"))
    arc.main_characters = body["main_characters"].get<std::vector<std::string>>();
  store_arc(arc);
  return arc;
}

void Curation::delete_arc(const std::string &arc_id) {
  stores.relational().load_arc(arc_id);  // UNKNOWN_ID
  stores.delete_arc(arc_id);
}

NarrativeArc Curation::merge_arcs(const std::string &keep_id, const std::string &absorb_id) {
  if (keep_id == absorb_id) throw Error("MERGE_CONFLICT", "cannot merge an arc into itself");
  auto &rel = stores.relational();
  NarrativeArc keep = rel.load_arc(keep_id);
  NarrativeArc absorb = rel.load_arc(absorb_id);
  if (keep.series != absorb.series)
    throw Error("MERGE_CONFLICT", "arcs belong to different series");
  for (const auto &c : absorb.main_characters)
    if (std::find(keep.main_characters.begin(), keep.main_characters.end(), c) ==
        keep.main_characters.end())
      keep.main_characters.push_back(c);
  for (const auto &p : absorb.progressions) {
    if (Progression *mine = keep.find_progression(p.episode)) {
      for (const auto &u : p.content)
        mine->content.push_back({static_cast<int>(mine->content.size()), u.text});
      for (const auto &c : p.interfering_characters)
        if (std::find(mine->interfering_characters.begin(), mine->interfering_characters.end(),
                      c) == mine->interfering_characters.end())
          mine->interfering_characters.push_back(c);
      continue;
    }
    Progression moved = p;
    moved.arc_id = keep.arc_id;
    moved.progression_id = new_progression_id(keep, p.episode);
    keep.progressions.push_back(std::move(moved));
  }
  keep.sort_progressions();
  auto report = validate_arc(keep, [&](const std::string &id) {
    return rel.find_character(id).has_value();
  });
  if (!report.empty()) throw ValidationFailed(std::move(report));
  rel.transaction([&] {
    stores.delete_arc(absorb_id);
    store_arc(keep);
  });
  return keep;
}

NarrativeArc Curation::add_progression(const std::string &arc_id, const json &body) {
  reject_unknown_fields(body, {"episode", "content", "interfering_characters"});
  NarrativeArc arc = stores.relational().load_arc(arc_id);
  Progression p;
  p.episode = body.at("episode").get<EpisodeKey>();
  p.arc_id = arc.arc_id;
  p.series = arc.series;
  p.progression_id = new_progression_id(arc, p.episode);
  p.content = Progression::make_content(clean_content(body.at("content").get<std::vector<std::string>>()));
  p.interfering_characters = body.value("interfering_characters", std::vector<std::string>{});
  arc.progressions.push_back(std::move(p));
  arc.sort_progressions();
  store_arc(arc);
  return arc;
}

NarrativeArc Curation::patch_progression(const std::string &arc_id,
                                         const std::string &progression_id, const json &body) {
  reject_unknown_fields(body, {"episode", "content", "interfering_characters"});
  NarrativeArc arc = stores.relational().load_arc(arc_id);
  auto it = std::find_if(arc.progressions.begin(), arc.progressions.end(),
                         [&](const Progression &p) { return p.progression_id == progression_id; });
  if (it == arc.progressions.end())
    throw Error("UNKNOWN_ID", "arc " + arc_id + " has no progression " + progression_id);
  if (body.contains("episode")) it->episode = body["episode"].get<EpisodeKey>();
  if (body.contains("content"))
    it->content =
        Progression::make_content(clean_content(body["content"].get<std::vector<std::string>>()));
  if (body.contains("interfering_characters"))
    it->interfering_characters = body["interfering_characters"].get<std::vector<std::string>>();
  arc.sort_progressions();
  store_arc(arc);
  return arc;
}

NarrativeArc Curation::delete_progression(const std::string &arc_id,
                                          const std::string &progression_id) {
  NarrativeArc arc = stores.relational().load_arc(arc_id);
  auto before = arc.progressions.size();
  std::erase_if(arc.progressions,
                [&](const Progression &p) { return p.progression_id == progression_id; });
  if (arc.progressions.size() == before)
    throw Error("UNKNOWN_ID", "arc " + arc_id + " has no progression " + progression_id);
  if (arc.progressions.empty())
    throw Error("CONFLICT", "cannot remove the last progression of " + arc_id + "; delete the arc");
  store_arc(arc);
  return arc;
}

Character Curation::patch_character(const std::string &character_id, const json &body) {
  reject_unknown_fields(body, {"preferred_name", "appellations"});
  Character c = stores.relational().load_character(character_id);
  if (body.contains("preferred_name"))
    c.preferred_name = text::collapse_whitespace(body["preferred_name"].get<std::string>());
  if (c.preferred_name.empty()) throw Error("EMPTY_NAME", "preferred_name must not be empty");
  if (body.contains("appellations")) {
    c.appellations.clear();
    for (const auto &a : body["appellations"].get<std::vector<std::string>>()) {
      std::string t = text::collapse_whitespace(a);
      if (!t.empty()) c.add_appellation(t);
    }
  }
  c.add_appellation(c.preferred_name);
  stores.relational().save_character(c);
  return stores.relational().load_character(character_id);
}

Character Curation::merge_characters(const std::string &keep_id, const std::string &drop_id) {
  return stores.relational().merge_characters(keep_id, drop_id);
}

namespace {

std::vector<EmbeddingRecord> summary_records(const MemoryStores &stores, const SeriesId &series) {
  QueryFilter f;
  f.series = series;
  f.target_kind = TargetKind::kArcSummary;
  return stores.vectors().records(f);
}

}  // namespace

std::vector<ClusterAssignment> Curation::clusters(const SeriesId &series, double threshold) const {
  if (threshold <= 0 || threshold >= 2)
    throw Error("INVALID_THRESHOLD", "cluster threshold must lie in (0, 2)");
  auto recs = summary_records(stores, series);
  if (recs.empty()) return {};
  return cluster_embeddings(recs, threshold);
}

std::vector<ProjectedPoint> Curation::pca(const SeriesId &series) const {
  auto recs = summary_records(stores, series);
  if (recs.empty()) return {};
  return pca_project_3d(recs);
}

std::vector<std::pair<std::string, ValidationReport>> Curation::invalid_arcs() const {
  const auto &rel = stores.relational();
  std::vector<std::pair<std::string, ValidationReport>> out;
  for (const auto &s : rel.list_series())
    for (const auto &arc : rel.list_arcs(s)) {
      auto r = validate_arc(arc, [&](const std::string &id) {
        return rel.find_character(id).has_value();
      });
      if (!r.empty()) out.emplace_back(arc.arc_id, std::move(r));
    }
  return out;
}

json generate_progression(LlmGateway &gateway, const RelationalStore &store,
                          const NarrativeArc &arc, const EpisodeDocument &doc) {
  std::string plot = doc.status >= DocStatus::kNormalized ? doc.normalized_plot()
                                                          : text::join(doc.sentences, " ");
  auto r = gateway.complete_structured("progression_generate",
                                       {{"series", doc.series.str()},
                                        {"episode", doc.episode.str()},
                                        {"arc", format_arc(arc, store)},
                                        {"plot", plot}});
  std::vector<std::string> content, ids, unresolved;
  for (const auto &s : r.parsed["progression"]) {
    std::string t = text::collapse_whitespace(s.get<std::string>());
    if (!t.empty()) content.push_back(t);
  }
  for (const auto &n : r.parsed["interfering_characters"]) {
    std::string name = n.get<std::string>();
    auto c = store.find_by_appellation(doc.series, name);
    if (!c) {
      unresolved.push_back(name);
      continue;
    }
    if (std::find(ids.begin(), ids.end(), c->character_id) == ids.end())
      ids.push_back(c->character_id);
  }
  return json{{"arc_id", arc.arc_id},
              {"episode", doc.episode},
              {"content", content},
              {"interfering_characters", ids},
              {"unresolved_names", unresolved},
              {"fingerprint", r.fingerprint}};
}

}  // namespace narrmem
