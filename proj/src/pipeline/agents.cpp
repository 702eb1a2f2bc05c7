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


#include "narrmem/pipeline/agents.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/core/text.hpp"
#include "narrmem/core/validate.hpp"
#include "narrmem/llm/embedding.hpp"

namespace narrmem {

using nlohmann::json;

void PipelineConfig::validate() const {
  auto in_range = [](double t) { return t >= -1.0 && t <= 1.0; };
  if (!in_range(theta_flag) || !in_range(theta_dedup))
    throw Error("INVALID_CONFIG", "thresholds must lie in [-1, 1]");
  if (agent1_k == 0 || dedup_k == 0 || paragraph_sentences == 0)
    throw Error("INVALID_CONFIG", "agent1_k, dedup_k and paragraph_sentences must be >= 1");
}

void to_json(json &j, const PipelineConfig &c) {
  j = json{{"theta_flag", c.theta_flag},
           {"theta_dedup", c.theta_dedup},
           {"agent1_k", c.agent1_k},
           {"paragraph_sentences", c.paragraph_sentences},
           {"dedup_k", c.dedup_k},
           {"embed_utterances", c.embed_utterances}};
}

void from_json(const json &j, PipelineConfig &c) {
  PipelineConfig d;
  c.theta_flag = j.value("theta_flag", d.theta_flag);
  c.theta_dedup = j.value("theta_dedup", d.theta_dedup);
  c.agent1_k = j.value("agent1_k", d.agent1_k);
  c.paragraph_sentences = j.value("paragraph_sentences", d.paragraph_sentences);
  c.dedup_k = j.value("dedup_k", d.dedup_k);
  c.embed_utterances = j.value("embed_utterances", d.embed_utterances);
}

void to_json(json &j, const CommitOutcome &o) {
  j = json{{"kind", o.kind == CommitOutcome::Kind::kCreated ? "created" : "linked"},
           {"arc_id", o.arc_id},
           {"progression_id", o.progression_id},
           {"utterances_added", o.utterances_added},
           {"adjudications", o.adjudications},
           {"fingerprints", o.fingerprints},
           {"notes", o.notes}};
}

namespace {

bool is_serial(ArcType t) { return t != ArcType::kAnthology; }

void add_unique(std::vector<std::string> &into, const std::vector<std::string> &from) {
  for (const auto &s : from)
    if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
}

void remove_all(std::vector<std::string> &from, const std::vector<std::string> &drop) {
  std::erase_if(from, [&](const std::string &s) {
    return std::find(drop.begin(), drop.end(), s) != drop.end();
  });
}

std::string names_of(const std::vector<std::string> &ids, const RelationalStore &store) {
  std::vector<std::string> names;
  for (const auto &id : ids) {
    auto c = store.find_character(id);
    names.push_back(c ? c->preferred_name : id);
  }
  return text::join(names, ", ");
}

StructuredResult call(const PipelineContext &ctx, AgentLog &log, const std::string &template_id,
                      const PromptVariables &vars) {
  auto r = ctx.gateway.complete_structured(template_id, vars);
  log.fingerprints.push_back(r.fingerprint);
  return r;
}

struct ResolvedNames {
  std::vector<std::string> names;  // preferred names, first-seen order
  std::vector<std::string> ids;
  std::vector<std::string> unresolved;
};

// Episode character map first, then the series' appellation index.
ResolvedNames resolve_names(const PipelineContext &ctx, const EpisodeDocument &doc,
                            const std::vector<std::string> &raw) {
  ResolvedNames out;
  const auto &store = ctx.stores.relational();
  for (const auto &r : raw) {
    std::string name = text::collapse_whitespace(r);
    if (name.empty()) continue;
    std::optional<Character> c;
    if (auto it = doc.character_map.find(name); it != doc.character_map.end())
      c = store.find_character(it->second);
    if (!c) c = store.find_by_appellation(doc.series, name);
    if (!c) {
      if (std::find(out.unresolved.begin(), out.unresolved.end(), name) == out.unresolved.end())
        out.unresolved.push_back(name);
      continue;
    }
    if (std::find(out.ids.begin(), out.ids.end(), c->character_id) != out.ids.end()) continue;
    out.ids.push_back(c->character_id);
    out.names.push_back(c->preferred_name);
  }
  return out;
}

std::string format_draft_list(const std::vector<ArcDraft> &drafts, bool detailed) {
  std::string out;
  for (size_t i = 0; i < drafts.size(); ++i) {
    const auto &d = drafts[i];
    if (i) out += detailed ? "\n\n" : "\n";
    out += "[" + std::to_string(i) + "] ";
    if (detailed)
      out += "\n" + format_draft(d);
    else
      out += d.title + " (" + std::string(to_string(d.arc_type)) + "): " + d.description;
  }
  return out;
}

json draft_summaries(const std::vector<ArcDraft> &drafts) {
  json out = json::array();
  for (const auto &d : drafts) out.push_back(d);
  return out;
}

// Embedding records for an arc: its summary plus each progression, and each
// utterance when asked.
std::vector<EmbeddingRecord> arc_records(const EmbeddingProvider &embedder,
                                         const NarrativeArc &arc, bool embed_utterances) {
  std::vector<EmbeddingRecord> recs;
  EmbeddingRecord summary;
  summary.target_kind = TargetKind::kArcSummary;
  summary.target_id = arc.arc_id;
  summary.arc_id = arc.arc_id;
  summary.series = arc.series;
  if (!arc.progressions.empty()) summary.episode = arc.progressions.back().episode;
  summary.text = arc.summary_text();
  recs.push_back(std::move(summary));
  for (const auto &p : arc.progressions) {
    EmbeddingRecord r;
    r.target_kind = TargetKind::kProgression;
    r.target_id = p.progression_id;
    r.arc_id = arc.arc_id;
    r.series = arc.series;
    r.episode = p.episode;
    r.text = text::join(p.texts(), " ");
    recs.push_back(std::move(r));
    if (!embed_utterances) continue;
    for (const auto &u : p.content) {
      EmbeddingRecord ur;
      ur.target_kind = TargetKind::kUtterance;
      ur.target_id = p.progression_id + "#" + std::to_string(u.ordinal);
      ur.arc_id = arc.arc_id;
      ur.series = arc.series;
      ur.episode = p.episode;
      ur.text = u.text;
      recs.push_back(std::move(ur));
    }
  }
  std::vector<std::string> texts;
  for (const auto &r : recs) texts.push_back(r.text);
  auto vecs = embed_texts(embedder, texts);
  for (size_t i = 0; i < recs.size(); ++i) recs[i].vector = std::move(vecs[i]);
  return recs;
}

CharacterExists character_exists(const RelationalStore &store) {
  return [&store](const std::string &id) { return store.find_character(id).has_value(); };
}

// Appends the draft as this episode's progression of `arc`. Utterances
// already present in an existing progression of the episode are not repeated.
size_t append_progression(NarrativeArc &arc, const EpisodeKey &episode, const ArcDraft &draft) {
  size_t added = 0;
  if (Progression *p = arc.find_progression(episode)) {
    auto have = p->texts();
    for (const auto &t : draft.progression_content) {
      if (std::find(have.begin(), have.end(), t) != have.end()) continue;
      p->content.push_back({static_cast<int>(p->content.size()), t});
      have.push_back(t);
      ++added;
    }
    add_unique(p->interfering_characters, draft.interfering_character_ids);
    remove_all(p->interfering_characters, arc.main_characters);
    return added;
  }
  Progression p;
  p.progression_id = new_progression_id(arc, episode);
  p.arc_id = arc.arc_id;
  p.series = arc.series;
  p.episode = episode;
  p.content = Progression::make_content(draft.progression_content);
  p.interfering_characters = draft.interfering_character_ids;
  remove_all(p.interfering_characters, arc.main_characters);
  arc.progressions.push_back(std::move(p));
  arc.sort_progressions();
  return draft.progression_content.size();
}

void write_arc(const PipelineContext &ctx, const NarrativeArc &arc) {
  // Embed before touching either store so a provider failure writes nothing.
  auto recs = arc_records(ctx.embedder, arc, ctx.config.embed_utterances);
  ctx.stores.relational().transaction([&] { ctx.stores.relational().save_arc(arc); });
  for (auto &r : recs) ctx.stores.vectors().upsert(std::move(r));
}

}  // namespace

std::string format_draft(const ArcDraft &d) {
  std::string out = "Title: " + d.title + "\nType: " + std::string(to_string(d.arc_type)) +
                    "\nDescription: " + d.description;
  if (!d.main_characters.empty())
    out += "\nMain characters: " + text::join(d.main_characters, ", ");
  if (!d.interfering_characters.empty())
    out += "\nInterfering characters: " + text::join(d.interfering_characters, ", ");
  if (!d.progression_content.empty())
    out += "\nProgression:\n" + text::numbered_lines(d.progression_content);
  return out;
}

std::string format_arc(const NarrativeArc &arc, const RelationalStore &store) {
  std::string out = "Title: " + arc.title + "\nType: " + std::string(to_string(arc.arc_type)) +
                    "\nDescription: " + arc.description;
  if (!arc.main_characters.empty())
    out += "\nMain characters: " + names_of(arc.main_characters, store);
  if (!arc.progressions.empty()) {
    const auto &p = arc.progressions.back();
    out += "\nLatest progression (" + p.episode.str() + "):\n" + text::numbered_lines(p.texts());
  }
  return out;
}

void reembed_arc(MemoryStores &stores, const EmbeddingProvider &embedder, const NarrativeArc &arc,
                 bool embed_utterances) {
  for (auto &r : arc_records(embedder, arc, embed_utterances)) stores.vectors().upsert(std::move(r));
}

// --- Agent 1 ---

std::vector<FlaggedArc> agent1_identify_existing(const PipelineContext &ctx,
                                                 const EpisodeDocument &doc, AgentLog &log) {
  std::vector<std::string> queries;
  const std::string plot = doc.normalized_plot();
  if (!plot.empty()) queries.push_back(plot);
  const auto &sents = doc.normalized;
  const size_t n = ctx.config.paragraph_sentences;
  for (size_t b = 0; b < sents.size(); b += n) {
    std::vector<std::string> part(sents.begin() + static_cast<long>(b),
                                  sents.begin() + static_cast<long>(std::min(sents.size(), b + n)));
    std::string q = text::join(part, " ");
    if (std::find(queries.begin(), queries.end(), q) == queries.end()) queries.push_back(q);
  }

  QueryFilter filter;
  filter.series = doc.series;
  filter.target_kind = TargetKind::kArcSummary;
  filter.before_episode = doc.episode;

  json qlog = json::array();
  std::map<std::string, double> best;
  if (!queries.empty() && ctx.stores.vectors().size() > 0) {
    auto vecs = embed_texts(ctx.embedder, queries);
    for (size_t i = 0; i < queries.size(); ++i) {
      auto hits = ctx.stores.vectors().query_similar(vecs[i], ctx.config.agent1_k, filter);
      json hl = json::array();
      for (const auto &h : hits) {
        hl.push_back({{"record_id", h.record.record_id},
                      {"arc_id", h.record.arc_id},
                      {"episode", h.record.episode ? h.record.episode->str() : ""},
                      {"score", h.score}});
        auto [it, fresh] = best.emplace(h.record.arc_id, h.score);
        if (!fresh) it->second = std::max(it->second, h.score);
      }
      qlog.push_back({{"query", i == 0 && !plot.empty() ? "plot" : "paragraph"},
                      {"series", doc.series.str()},
                      {"target_kind", "arc_summary"},
                      {"before_episode", doc.episode.str()},
                      {"hits", hl}});
    }
  }

  std::vector<FlaggedArc> flagged;
  for (const auto &[arc_id, score] : best) {
    if (score < ctx.config.theta_flag) continue;
    auto arc = ctx.stores.relational().find_arc(arc_id);
    if (!arc) {
      log.notes.push_back("STALE_EMBEDDING: " + arc_id);
      continue;
    }
    flagged.push_back({arc_id, arc->title, arc->description, arc->arc_type, score});
  }
  std::stable_sort(flagged.begin(), flagged.end(), [](const FlaggedArc &a, const FlaggedArc &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.arc_id < b.arc_id;
  });
  log.output = {{"queries", qlog}, {"flagged", flagged}};
  return flagged;
}

// --- Agent 2 ---

std::vector<ArcDraft> agent2_extract_anthology(const PipelineContext &ctx,
                                               const EpisodeDocument &doc, AgentLog &log) {
  auto r = call(ctx, log, "agent2_extract_anthology",
                {{"series", doc.series.str()},
                 {"episode", doc.episode.str()},
                 {"plot", doc.normalized_plot()}});
  std::vector<ArcDraft> drafts;
  for (const auto &a : r.parsed["arcs"]) {
    ArcDraft d;
    d.provisional_id = "a2-" + std::to_string(drafts.size());
    d.title = text::collapse_whitespace(a["title"].get<std::string>());
    d.description = text::collapse_whitespace(a["description"].get<std::string>());
    d.arc_type = ArcType::kAnthology;
    d.origin = DraftOrigin::kAgent2;
    drafts.push_back(std::move(d));
  }
  log.output = {{"drafts", draft_summaries(drafts)}};
  return drafts;
}

// --- Agent 3 ---

std::vector<ArcDraft> agent3_extract_serial(const PipelineContext &ctx, const EpisodeDocument &doc,
                                            const std::vector<FlaggedArc> &flagged,
                                            AgentLog &log) {
  std::string listing;
  for (const auto &f : flagged) {
    if (!listing.empty()) listing += "\n";
    listing += "- [" + f.arc_id + "] " + f.title + " (" + std::string(to_string(f.arc_type)) +
               "): " + f.description;
  }
  auto r = call(ctx, log, "agent3_extract_serial",
                {{"series", doc.series.str()},
                 {"episode", doc.episode.str()},
                 {"flagged", listing.empty() ? "(none)" : listing},
                 {"plot", doc.normalized_plot()}});

  std::vector<ArcDraft> drafts;
  for (const auto &a : r.parsed["new_arcs"]) {
    ArcDraft d;
    d.provisional_id = "a3-" + std::to_string(drafts.size());
    d.title = text::collapse_whitespace(a["title"].get<std::string>());
    d.description = text::collapse_whitespace(a["description"].get<std::string>());
    d.arc_type = parse_arc_type(a["arc_type"].get<std::string>());
    d.origin = DraftOrigin::kAgent3New;
    drafts.push_back(std::move(d));
  }

  std::map<std::string, bool> verdicts;
  for (const auto &v : r.parsed["validations"]) {
    std::string id = v["arc_id"].get<std::string>();
    bool known = std::any_of(flagged.begin(), flagged.end(),
                             [&](const FlaggedArc &f) { return f.arc_id == id; });
    if (!known) {
      log.notes.push_back("UNKNOWN_ARC_ID: " + id);
      continue;
    }
    verdicts[id] = v["present"].get<bool>();
  }
  json validations = json::array();
  for (const auto &f : flagged) {
    auto it = verdicts.find(f.arc_id);
    bool present = it != verdicts.end() && it->second;
    if (it == verdicts.end()) log.notes.push_back("NO_VERDICT: " + f.arc_id);
    validations.push_back({{"arc_id", f.arc_id}, {"present", present}});
    if (!present) continue;
    ArcDraft d;
    d.provisional_id = "a3v-" + f.arc_id;
    d.title = f.title;
    d.description = f.description;
    d.arc_type = f.arc_type;
    d.origin = DraftOrigin::kAgent3Validated;
    d.flags.insert(DraftFlag::kPossiblyPresent);
    d.existing_arc_id = f.arc_id;
    drafts.push_back(std::move(d));
  }
  log.output = {{"drafts", draft_summaries(drafts)}, {"validations", validations}};
  return drafts;
}

// --- Agent 4 ---

std::vector<ArcDraft> agent4_optimize_season(const PipelineContext &ctx, const EpisodeDocument &doc,
                                             std::vector<ArcDraft> drafts, AgentLog &log) {
  json merges = json::array();
  for (size_t i = 0; i < drafts.size(); ++i) {
    if (!is_serial(drafts[i].arc_type)) continue;
    for (size_t j = i + 1; j < drafts.size();) {
      ArcDraft &a = drafts[i];
      const ArcDraft &b = drafts[j];
      if (!is_serial(b.arc_type) || (!a.existing_arc_id.empty() && !b.existing_arc_id.empty())) {
        ++j;
        continue;
      }
      bool cautious = a.flags.count(DraftFlag::kPossiblyPresent) ||
                      b.flags.count(DraftFlag::kPossiblyPresent);
      std::string strictness =
          cautious ? "At least one draft continues a storyline already in the archive. Merge only "
                     "if both clearly tell the same story; a shared character is not enough."
                   : "Merge when both follow the same characters through the same conflict.";
      auto r = call(ctx, log, "agent4_optimize_season",
                    {{"episode", doc.episode.str()},
                     {"strictness", strictness},
                     {"arc_a", format_draft(a)},
                     {"arc_b", format_draft(b)}});
      if (!r.parsed["same_storyline"].get<bool>()) {
        ++j;
        continue;
      }
      const json &p = r.parsed;
      merges.push_back({{"kept", a.provisional_id}, {"absorbed", b.provisional_id}});
      if (p.contains("title") && !text::trim(p["title"].get<std::string>()).empty())
        a.title = text::collapse_whitespace(p["title"].get<std::string>());
      if (p.contains("description") && !text::trim(p["description"].get<std::string>()).empty())
        a.description = text::collapse_whitespace(p["description"].get<std::string>());
      if (p.contains("arc_type")) a.arc_type = parse_arc_type(p["arc_type"].get<std::string>());
      add_unique(a.main_characters, b.main_characters);
      add_unique(a.interfering_characters, b.interfering_characters);
      remove_all(a.interfering_characters, a.main_characters);
      add_unique(a.progression_content, b.progression_content);
      a.flags.insert(b.flags.begin(), b.flags.end());
      if (a.existing_arc_id.empty()) a.existing_arc_id = b.existing_arc_id;
      a.origin = DraftOrigin::kMerged;
      drafts.erase(drafts.begin() + static_cast<long>(j));
    }
  }
  log.output = {{"merges", merges}, {"drafts", draft_summaries(drafts)}};
  return drafts;
}

// --- Agent 5 ---

std::vector<ArcDraft> agent5_deduplicate(const PipelineContext &ctx, const EpisodeDocument &doc,
                                         std::vector<ArcDraft> drafts, AgentLog &log) {
  json groups = json::array();
  if (drafts.size() < 2) {
    log.output = {{"groups", groups}, {"drafts", draft_summaries(drafts)}};
    return drafts;
  }
  auto r = call(ctx, log, "agent5_deduplicate",
                {{"episode", doc.episode.str()}, {"arcs", format_draft_list(drafts, false)}});

  std::vector<bool> used(drafts.size(), false), removed(drafts.size(), false);
  for (const auto &g : r.parsed["duplicates"]) {
    std::vector<size_t> members;
    for (const auto &m : g["members"]) {
      long long idx = m.get<long long>();
      if (idx < 0 || static_cast<size_t>(idx) >= drafts.size() || used[static_cast<size_t>(idx)] ||
          std::find(members.begin(), members.end(), static_cast<size_t>(idx)) != members.end()) {
        log.notes.push_back("IGNORED_MEMBER: " + std::to_string(idx));
        continue;
      }
      members.push_back(static_cast<size_t>(idx));
    }
    if (members.size() < 2) continue;
    ArcType chosen = parse_arc_type(g["arc_type"].get<std::string>());
    auto first_of = [&](ArcType t) {
      return std::find_if(members.begin(), members.end(),
                          [&](size_t m) { return drafts[m].arc_type == t; });
    };
    auto survivor_it = first_of(chosen);
    if (survivor_it == members.end()) {
      log.notes.push_back("TYPE_OUT_OF_GROUP: " + std::string(to_string(chosen)));
      chosen = drafts[members.front()].arc_type;
      survivor_it = members.begin();
    }
    size_t s = *survivor_it;
    json absorbed = json::array();
    for (size_t m : members) {
      used[m] = true;
      if (m == s) continue;
      ArcDraft &keep = drafts[s];
      const ArcDraft &other = drafts[m];
      add_unique(keep.main_characters, other.main_characters);
      add_unique(keep.interfering_characters, other.interfering_characters);
      remove_all(keep.interfering_characters, keep.main_characters);
      add_unique(keep.progression_content, other.progression_content);
      keep.flags.insert(other.flags.begin(), other.flags.end());
      if (keep.existing_arc_id.empty()) {
        keep.existing_arc_id = other.existing_arc_id;
      } else if (!other.existing_arc_id.empty() && other.existing_arc_id != keep.existing_arc_id) {
        log.notes.push_back("DROPPED_CONTINUATION: " + other.existing_arc_id);
      }
      removed[m] = true;
      absorbed.push_back(other.provisional_id);
    }
    drafts[s].flags.erase(DraftFlag::kNeedsDisambiguation);
    groups.push_back({{"survivor", drafts[s].provisional_id},
                      {"absorbed", absorbed},
                      {"arc_type", to_string(chosen)}});
  }
  std::vector<ArcDraft> out;
  for (size_t i = 0; i < drafts.size(); ++i)
    if (!removed[i]) out.push_back(std::move(drafts[i]));
  log.output = {{"groups", groups}, {"drafts", draft_summaries(out)}};
  return out;
}

// --- Agent 6 ---

std::vector<ArcDraft> agent6_enhance_details(const PipelineContext &ctx, const EpisodeDocument &doc,
                                             std::vector<ArcDraft> drafts, AgentLog &log) {
  // Characters normalized in this episode, by preferred name.
  std::map<std::string, Character> known;
  for (const auto &[surface, id] : doc.character_map) {
    if (auto c = ctx.stores.relational().find_character(id)) known.emplace(c->preferred_name, *c);
  }
  std::string listing;
  for (const auto &[name, c] : known) {
    if (!listing.empty()) listing += "\n";
    listing += "- " + name;
    std::vector<std::string> others;
    for (const auto &a : c.appellations)
      if (a != name) others.push_back(a);
    if (!others.empty()) listing += " (also: " + text::join(others, ", ") + ")";
  }
  if (listing.empty()) listing = "(none)";

  json unresolved = json::object();
  for (auto &d : drafts) {
    auto r = call(ctx, log, "agent6_enhance_details",
                  {{"series", doc.series.str()},
                   {"episode", doc.episode.str()},
                   {"arc", format_draft(d)},
                   {"characters", listing},
                   {"plot", doc.normalized_plot()}});
    auto main = resolve_names(ctx, doc, r.parsed["main_characters"].get<std::vector<std::string>>());
    auto inter =
        resolve_names(ctx, doc, r.parsed["interfering_characters"].get<std::vector<std::string>>());
    d.main_characters = main.names;
    d.main_character_ids = main.ids;
    d.interfering_characters = inter.names;
    d.interfering_character_ids = inter.ids;
    remove_all(d.interfering_characters, d.main_characters);
    remove_all(d.interfering_character_ids, d.main_character_ids);
    d.unresolved_names = main.unresolved;
    add_unique(d.unresolved_names, inter.unresolved);
    if (!d.unresolved_names.empty()) unresolved[d.provisional_id] = d.unresolved_names;
    d.progression_content.clear();
    for (const auto &s : r.parsed["progression"]) {
      std::string t = text::collapse_whitespace(s.get<std::string>());
      if (!t.empty()) d.progression_content.push_back(std::move(t));
    }
    if (d.main_character_ids.empty())
      throw Error("NO_MAIN_CHARACTERS",
                  "draft '" + d.title + "' has no resolvable main character after enhancement");
  }
  log.output = {{"drafts", draft_summaries(drafts)}, {"unresolved_names", unresolved}};
  return drafts;
}

// --- Agent 7 ---

std::vector<ArcDraft> agent7_verify_progressions(const PipelineContext &ctx,
                                                 const EpisodeDocument &doc,
                                                 std::vector<ArcDraft> drafts, AgentLog &log) {
  (void)doc;
  json removed = json::object();
  std::vector<ArcDraft> out;
  for (auto &d : drafts) {
    ArcDraft header = d;
    header.progression_content.clear();
    auto r = call(ctx, log, "agent7_verify_progressions",
                  {{"arc", format_draft(header)},
                   {"utterances", d.progression_content.empty()
                                      ? std::string("(none)")
                                      : text::numbered_lines(d.progression_content)}});
    std::set<size_t> drop;
    for (const auto &i : r.parsed["irrelevant"]) {
      long long idx = i.get<long long>();
      if (idx >= 0 && static_cast<size_t>(idx) < d.progression_content.size())
        drop.insert(static_cast<size_t>(idx));
    }
    if (!drop.empty()) removed[d.provisional_id] = std::vector<size_t>(drop.begin(), drop.end());
    std::vector<std::string> kept;
    for (size_t i = 0; i < d.progression_content.size(); ++i)
      if (!drop.count(i)) kept.push_back(d.progression_content[i]);
    d.progression_content = std::move(kept);
    if (d.progression_content.empty()) {
      log.notes.push_back("VERIFIER_EMPTIED: " + d.provisional_id);
      continue;
    }
    out.push_back(std::move(d));
  }
  log.output = {{"removed", removed}, {"drafts", draft_summaries(out)}};
  return out;
}

// --- Agent 8 ---

std::vector<ArcDraft> agent8_verify_roles(const PipelineContext &ctx, const EpisodeDocument &doc,
                                          std::vector<ArcDraft> drafts, AgentLog &log) {
  json changes = json::array();
  for (auto &d : drafts) {
    json roles = {{"main_characters", d.main_characters},
                  {"interfering_characters", d.interfering_characters}};
    auto r = call(ctx, log, "agent8_verify_roles",
                  {{"arc", "Title: " + d.title + "\nType: " +
                               std::string(to_string(d.arc_type)) +
                               "\nDescription: " + d.description},
                   {"progression", text::numbered_lines(d.progression_content)},
                   {"roles_json", roles.dump()}});
    auto main = resolve_names(ctx, doc, r.parsed["main_characters"].get<std::vector<std::string>>());
    auto inter =
        resolve_names(ctx, doc, r.parsed["interfering_characters"].get<std::vector<std::string>>());
    for (const auto &u : main.unresolved) log.notes.push_back("UNRESOLVED_NAME: " + u);
    for (const auto &u : inter.unresolved) log.notes.push_back("UNRESOLVED_NAME: " + u);
    if (main.ids.empty()) {
      log.notes.push_back("ROLES_REJECTED: " + d.provisional_id);
      continue;
    }
    size_t before = inter.ids.size();
    remove_all(inter.ids, main.ids);
    remove_all(inter.names, main.names);
    if (inter.ids.size() != before) log.notes.push_back("DISJOINT_REPAIR: " + d.provisional_id);
    if (main.ids != d.main_character_ids || inter.ids != d.interfering_character_ids)
      changes.push_back({{"draft", d.provisional_id},
                         {"main_characters", main.names},
                         {"interfering_characters", inter.names}});
    d.main_characters = main.names;
    d.main_character_ids = main.ids;
    d.interfering_characters = inter.names;
    d.interfering_character_ids = inter.ids;
  }
  log.output = {{"changes", changes}, {"drafts", draft_summaries(drafts)}};
  return drafts;
}

// --- Agent 9 ---

std::vector<ArcDraft> agent9_final_review(const PipelineContext &ctx, const EpisodeDocument &doc,
                                          std::vector<ArcDraft> drafts, AgentLog &log) {
  json rejected = json::array();
  if (drafts.empty()) {
    log.output = {{"rejected", rejected}};
    return drafts;
  }
  auto r = call(ctx, log, "agent9_final_review",
                {{"series", doc.series.str()},
                 {"episode", doc.episode.str()},
                 {"arcs", format_draft_list(drafts, true)}});
  std::vector<bool> keep(drafts.size(), true);
  for (const auto &dec : r.parsed["decisions"]) {
    long long idx = dec["index"].get<long long>();
    if (idx < 0 || static_cast<size_t>(idx) >= drafts.size()) {
      log.notes.push_back("IGNORED_DECISION: " + std::to_string(idx));
      continue;
    }
    if (dec["accept"].get<bool>()) continue;
    keep[static_cast<size_t>(idx)] = false;
    rejected.push_back({{"draft", drafts[static_cast<size_t>(idx)].provisional_id},
                        {"reason", dec.value("reason", "")}});
  }
  std::vector<ArcDraft> out;
  for (size_t i = 0; i < drafts.size(); ++i)
    if (keep[i]) out.push_back(std::move(drafts[i]));
  log.output = {{"rejected", rejected}};
  return out;
}

// --- semantic commit ---

CommitOutcome semantic_commit(const PipelineContext &ctx, const SeriesId &series,
                              const EpisodeKey &episode, const ArcDraft &draft) {
  auto &store = ctx.stores.relational();
  auto exists = character_exists(store);
  CommitOutcome out;

  auto try_link = [&](const std::string &arc_id) -> bool {
    auto found = store.find_arc(arc_id);
    if (!found) return false;
    NarrativeArc arc = *found;
    add_unique(arc.main_characters, draft.main_character_ids);
    size_t added = append_progression(arc, episode, draft);
    auto report = validate_arc(arc, exists);
    if (!report.empty()) {
      out.notes.push_back("LINK_REJECTED: " + arc_id + " (" +
                          text::join(violation_codes(report), ", ") + ")");
      return false;
    }
    write_arc(ctx, arc);
    out.kind = CommitOutcome::Kind::kLinked;
    out.arc_id = arc.arc_id;
    out.progression_id = arc.find_progression(episode)->progression_id;
    out.utterances_added = added;
    return true;
  };

  if (!draft.existing_arc_id.empty()) {
    if (try_link(draft.existing_arc_id)) return out;
    if (!store.find_arc(draft.existing_arc_id))
      out.notes.push_back("STALE_CONTINUATION: " + draft.existing_arc_id);
  }

  NarrativeArc probe;
  probe.title = draft.title;
  probe.description = draft.description;
  QueryFilter filter;
  filter.series = series;
  filter.target_kind = TargetKind::kArcSummary;
  filter.max_episode = episode;
  if (ctx.stores.vectors().size() > 0) {
    auto hits = ctx.stores.vectors().query_similar(probe.summary_text(), ctx.config.dedup_k,
                                                   filter, ctx.embedder);
    for (const auto &h : hits) {
      if (h.score < ctx.config.theta_dedup) break;
      if (h.record.arc_id == draft.existing_arc_id) continue;
      auto existing = store.find_arc(h.record.arc_id);
      if (!existing) continue;
      auto r = ctx.gateway.complete_structured(
          "same_storyline",
          {{"existing", format_arc(*existing, store)}, {"candidate", format_draft(draft)}});
      out.fingerprints.push_back(r.fingerprint);
      bool same = r.parsed["same_storyline"].get<bool>();
      out.adjudications.push_back({{"arc_id", existing->arc_id},
                                   {"score", h.score},
                                   {"same_storyline", same},
                                   {"reason", r.parsed.value("reason", "")}});
      if (same && try_link(existing->arc_id)) return out;
    }
  }

  NarrativeArc arc;
  arc.series = series;
  std::string disc = episode.str() + "/" + draft.title;
  arc.arc_id = derive_id(IdKind::kArc, series, disc);
  for (int n = 2; store.find_arc(arc.arc_id); ++n)
    arc.arc_id = derive_id(IdKind::kArc, series, disc + "#" + std::to_string(n));
  arc.title = draft.title;
  arc.description = draft.description;
  arc.arc_type = draft.arc_type;
  arc.main_characters = draft.main_character_ids;
  append_progression(arc, episode, draft);
  auto report = validate_arc(arc, exists);
  if (!report.empty())
    throw Error("INVALID_ARC", "draft '" + draft.title + "' fails validation: " +
                                   text::join(violation_codes(report), ", "));
  write_arc(ctx, arc);
  out.kind = CommitOutcome::Kind::kCreated;
  out.arc_id = arc.arc_id;
  out.progression_id = arc.progressions.front().progression_id;
  out.utterances_added = draft.progression_content.size();
  return out;
}

}  // namespace narrmem
