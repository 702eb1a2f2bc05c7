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


#include "narrmem/eval/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "narrmem/core/error.hpp"
#include "narrmem/memory/vector_math.hpp"

namespace narrmem {

using nlohmann::json;

void to_json(json &j, const GoldArc &g) {
  j = json{{"title", g.title},
           {"arc_type", g.arc_type},
           {"episodes", g.episodes},
           {"main_characters", g.main_characters}};
}

void from_json(const json &j, GoldArc &g) {
  j.at("title").get_to(g.title);
  j.at("arc_type").get_to(g.arc_type);
  g.episodes = j.value("episodes", std::vector<EpisodeKey>{});
  g.main_characters = j.value("main_characters", std::vector<std::string>{});
}

void to_json(json &j, const MappingOverride &o) {
  j = json{{"arc_id", o.arc_id}, {"gold_index", o.gold_index ? json(*o.gold_index) : json()}};
}

void from_json(const json &j, MappingOverride &o) {
  j.at("arc_id").get_to(o.arc_id);
  const json &g = j.at("gold_index");
  if (g.is_null())
    o.gold_index.reset();
  else
    o.gold_index = g.get<size_t>();
}

void to_json(json &j, const GoldStandard &g) {
  j = json{{"series", g.series},
           {"season", g.season},
           {"gold_arcs", g.gold_arcs},
           {"gold_characters", g.gold_characters},
           {"mapping_overrides", g.mapping_overrides}};
}

void from_json(const json &j, GoldStandard &g) {
  j.at("series").get_to(g.series);
  g.season = j.value("season", 1);
  j.at("gold_arcs").get_to(g.gold_arcs);
  g.gold_characters = j.value("gold_characters", std::vector<std::string>{});
  g.mapping_overrides = j.value("mapping_overrides", std::vector<MappingOverride>{});
}

namespace {

json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("IO_ERROR", "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error("INVALID_GOLD", path.string() + ": " + e.what());
  }
}

}  // namespace

GoldStandard GoldStandard::load(const std::filesystem::path &path) {
  json j = read_json(path);
  try {
    return j.get<GoldStandard>();
  } catch (const json::exception &e) {
    throw Error("INVALID_GOLD", path.string() + ": " + e.what());
  }
}

std::vector<MappingOverride> load_overrides(const std::filesystem::path &path) {
  json j = read_json(path);
  try {
    if (j.is_object()) return j.at("mapping_overrides").get<std::vector<MappingOverride>>();
    return j.get<std::vector<MappingOverride>>();
  } catch (const json::exception &e) {
    throw Error("INVALID_GOLD", path.string() + ": " + e.what());
  }
}

ArcMatching match_arcs(const std::vector<NarrativeArc> &extracted,
                       const std::vector<GoldArc> &gold,
                       const std::vector<MappingOverride> &overrides,
                       const EmbeddingProvider &embedder, double threshold) {
  std::set<std::string> known;
  for (const auto &a : extracted) known.insert(a.arc_id);

  std::map<std::string, std::optional<size_t>> pinned;
  std::map<size_t, std::string> gold_owner;
  for (const auto &o : overrides) {
    if (!known.count(o.arc_id))
      throw Error("INVALID_OVERRIDE", "override names unknown arc " + o.arc_id);
    if (o.gold_index && *o.gold_index >= gold.size())
      throw Error("INVALID_OVERRIDE", "override names gold index " +
                                          std::to_string(*o.gold_index) + " of " +
                                          std::to_string(gold.size()));
    auto [it, fresh] = pinned.emplace(o.arc_id, o.gold_index);
    if (!fresh && it->second != o.gold_index)
      throw Error("CONFLICTING_OVERRIDES", "arc " + o.arc_id + " is pinned twice");
    if (o.gold_index) {
      auto [g, gfresh] = gold_owner.emplace(*o.gold_index, o.arc_id);
      if (!gfresh && g->second != o.arc_id)
        throw Error("CONFLICTING_OVERRIDES", "gold arc " + std::to_string(*o.gold_index) +
                                                 " is pinned to " + g->second + " and " +
                                                 o.arc_id);
    }
  }

  ArcMatching m;
  std::set<std::string> arc_taken;
  std::set<size_t> gold_taken;
  for (const auto &[arc_id, g] : pinned) {
    arc_taken.insert(arc_id);
    if (!g) continue;
    gold_taken.insert(*g);
    m.pairs.push_back({arc_id, *g, 1.0, true});
  }

  std::vector<const NarrativeArc *> open;
  for (const auto &a : extracted)
    if (!arc_taken.count(a.arc_id)) open.push_back(&a);

  std::vector<ArcMatch> candidates;
  if (!open.empty() && !gold.empty()) {
    std::vector<std::string> texts;
    for (const auto *a : open) texts.push_back(a->summary_text());
    for (const auto &g : gold) texts.push_back(g.title);
    auto vecs = embedder.embed(texts);
    for (size_t i = 0; i < open.size(); ++i)
      for (size_t g = 0; g < gold.size(); ++g)
        candidates.push_back({open[i]->arc_id, g,
                              cosine_similarity(vecs[i], vecs[open.size() + g]), false});
  }
  std::sort(candidates.begin(), candidates.end(), [](const ArcMatch &a, const ArcMatch &b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.arc_id != b.arc_id) return a.arc_id < b.arc_id;
    return a.gold_index < b.gold_index;
  });

  std::map<std::string, ArcMatch> best_rejected;
  for (const auto &c : candidates) {
    if (c.score < threshold) break;
    if (arc_taken.count(c.arc_id)) continue;
    if (gold_taken.count(c.gold_index)) {
      best_rejected.emplace(c.arc_id, c);  // first seen is the best
      continue;
    }
    arc_taken.insert(c.arc_id);
    gold_taken.insert(c.gold_index);
    m.pairs.push_back(c);
  }

  std::sort(m.pairs.begin(), m.pairs.end(),
            [](const ArcMatch &a, const ArcMatch &b) { return a.arc_id < b.arc_id; });
  for (const auto &a : extracted) {
    if (std::any_of(m.pairs.begin(), m.pairs.end(),
                    [&](const ArcMatch &p) { return p.arc_id == a.arc_id; }))
      continue;
    m.unmatched_extracted.push_back(a.arc_id);
    if (auto it = best_rejected.find(a.arc_id); it != best_rejected.end())
      m.duplicates.push_back(it->second);
  }
  std::sort(m.unmatched_extracted.begin(), m.unmatched_extracted.end());
  for (size_t g = 0; g < gold.size(); ++g)
    if (!gold_taken.count(g)) m.unmatched_gold.push_back(g);
  return m;
}

std::optional<double> precision(size_t correct, size_t extracted) {
  if (extracted == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(extracted);
}

void to_json(json &j, const TypeScore &s) {
  j = json{{"extracted", s.extracted},
           {"matched", s.matched},
           {"correct", s.correct},
           {"precision", s.precision ? json(*s.precision) : json()}};
}

void to_json(json &j, const EvalReport &r) {
  json per = json::object();
  for (const auto &[t, s] : r.per_type) per[std::string(to_string(t))] = s;
  j = json{{"per_type", per},
           {"overall", r.overall},
           {"characters", {{"extracted", r.characters.extracted}, {"correct", r.characters.correct}}},
           {"duplication_count", r.duplication_count},
           {"unmatched_extracted", r.unmatched_extracted},
           {"missed_gold", r.missed_gold}};
}

CharacterScore score_characters(const std::vector<Character> &extracted,
                                const std::vector<std::string> &gold_names) {
  std::set<std::string> gold;
  for (const auto &n : gold_names) gold.insert(fold_appellation(n));
  CharacterScore s;
  s.extracted = extracted.size();
  for (const auto &c : extracted) {
    bool hit = gold.count(fold_appellation(c.preferred_name)) > 0;
    for (const auto &a : c.appellations) hit = hit || gold.count(fold_appellation(a)) > 0;
    if (hit) ++s.correct;
  }
  return s;
}

EvalReport compute_report(const ArcMatching &matching, const std::vector<NarrativeArc> &extracted,
                          const std::vector<GoldArc> &gold,
                          const std::vector<Character> &characters,
                          const std::vector<std::string> &gold_characters) {
  EvalReport r;
  for (auto t : {ArcType::kAnthology, ArcType::kSoap, ArcType::kGenreSpecific}) r.per_type[t];
  std::map<std::string, const ArcMatch *> by_arc;
  for (const auto &p : matching.pairs) by_arc[p.arc_id] = &p;
  for (const auto &a : extracted) {
    TypeScore &s = r.per_type[a.arc_type];
    ++s.extracted;
    ++r.overall.extracted;
    auto it = by_arc.find(a.arc_id);
    if (it == by_arc.end()) continue;
    ++s.matched;
    ++r.overall.matched;
    if (gold.at(it->second->gold_index).arc_type == a.arc_type) {
      ++s.correct;
      ++r.overall.correct;
    }
  }
  for (auto &[t, s] : r.per_type) s.precision = precision(s.correct, s.extracted);
  r.overall.precision = precision(r.overall.correct, r.overall.extracted);
  r.characters = score_characters(characters, gold_characters);
  r.duplication_count = matching.duplicates.size();
  r.unmatched_extracted = matching.unmatched_extracted.size();
  for (size_t g : matching.unmatched_gold) r.missed_gold.push_back(gold.at(g).title);
  return r;
}

std::string render_table(const EvalReport &report) {
  std::string out;
  char line[160];
  auto fmt_p = [](const std::optional<double> &p) {
    if (!p) return std::string("n/a");
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", *p);
    return std::string(b);
  };
  std::snprintf(line, sizeof line, "%-16s %9s %7s %7s %9s\n", "arc type", "extracted", "matched",
                "correct", "precision");
  out += line;
  auto row = [&](const std::string &name, const TypeScore &s) {
    std::snprintf(line, sizeof line, "%-16s %9zu %7zu %7zu %9s\n", name.c_str(), s.extracted,
                  s.matched, s.correct, fmt_p(s.precision).c_str());
    out += line;
  };
  for (const auto &[t, s] : report.per_type) row(std::string(to_string(t)), s);
  row("all", report.overall);
  std::snprintf(line, sizeof line, "\ncharacters: %zu correct of %zu extracted\n",
                report.characters.correct, report.characters.extracted);
  out += line;
  std::snprintf(line, sizeof line, "duplicates: %zu\nunmatched extracted: %zu\n",
                report.duplication_count, report.unmatched_extracted);
  out += line;
  out += "missed gold: " + std::to_string(report.missed_gold.size()) + "\n";
  for (const auto &t : report.missed_gold) out += "  - " + t + "\n";
  return out;
}

}  // namespace narrmem
