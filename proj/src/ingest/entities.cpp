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

#include "narrmem/ingest/entities.hpp"

#include <algorithm>
#include <cctype>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/core/text.hpp"
#include "narrmem/memory/vector_math.hpp"

namespace narrmem {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool is_honorific(const std::string &core) {
  const std::string l = text::to_lower(core);
  return l == "dr" || l == "mr" || l == "mrs" || l == "ms";
}

bool is_function_word(const std::string &core) {
  static const std::set<std::string> kWords = {
      "a",       "after",  "again",  "all",     "also",   "although", "an",     "and",
      "another", "as",     "at",     "back",    "because", "before",  "both",   "but",
      "by",      "despite", "during", "each",   "even",   "eventually", "every", "finally",
      "for",     "from",   "he",     "her",     "his",    "however",  "i",      "if",
      "in",      "into",   "it",     "its",     "later",  "meanwhile", "now",   "on",
      "once",    "one",    "only",   "she",     "since",  "so",       "soon",   "still",
      "that",    "the",    "their",  "then",    "there",  "these",    "they",   "this",
      "those",   "though", "to",     "two",     "upon",   "when",     "while",  "with",
      "without", "yet"};
  return kWords.count(text::to_lower(core)) > 0;
}

struct Token {
  size_t begin = 0;  // offset of the core in the sentence
  std::string core;
  bool breaks_after = false;  // trailing punctuation ends a name run
  bool honorific = false;
};

std::vector<Token> tokenize(const std::string &s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (b == i) break;
    std::string raw = s.substr(b, i - b);
    size_t lead = 0;
    while (lead < raw.size() && std::string("(\"'[").find(raw[lead]) != std::string::npos) ++lead;
    size_t end = raw.size();
    while (end > lead && std::string(",.;:!?)\"']").find(raw[end - 1]) != std::string::npos) --end;
    Token t;
    t.begin = b + lead;
    t.core = raw.substr(lead, end - lead);
    t.honorific = is_honorific(t.core) && end < raw.size() && raw[end] == '.' &&
                  end + 1 == raw.size();
    t.breaks_after = end < raw.size() && !t.honorific;
    out.push_back(std::move(t));
  }
  return out;
}

std::string strip_possessive(const std::string &core) {
  for (const char *suffix : {"'s", "\xE2\x80\x99s"}) {
    std::string sf(suffix);
    if (core.size() > sf.size() && core.compare(core.size() - sf.size(), sf.size(), sf) == 0)
      return core.substr(0, core.size() - sf.size());
  }
  return core;
}

void flush_run(const std::string &sentence, std::vector<Token> &run, size_t index,
               std::vector<MentionCandidate> &out) {
  size_t first = 0;
  while (first < run.size() && !run[first].honorific && is_function_word(run[first].core)) ++first;
  // Drop a trailing honorific with no name after it.
  size_t last = run.size();
  while (last > first && run[last - 1].honorific) --last;
  bool has_name = false;
  for (size_t k = first; k < last; ++k) has_name = has_name || !run[k].honorific;
  if (has_name) {
    const Token &a = run[first];
    const Token &z = run[last - 1];
    std::string tail = strip_possessive(z.core);
    size_t end = z.begin + tail.size();
    std::string surface = sentence.substr(a.begin, end - a.begin);
    if (!surface.empty()) out.push_back({surface, index, MentionSource::kNer, ""});
  }
  run.clear();
}

std::vector<size_t> find_word_bounded(const std::string &hay, const std::string &needle) {
  std::vector<size_t> at;
  if (needle.empty()) return at;
  for (size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1))
    if (text::at_word_boundary(hay, p, needle.size())) at.push_back(p);
  return at;
}

}  // namespace

void to_json(nlohmann::json &j, const MentionCandidate &m) {
  j = {{"surface", m.surface},
       {"sentence_index", m.sentence_index},
       {"source", m.source == MentionSource::kNer ? "ner" : "llm_refinement"},
       {"entity_key", m.entity_key}};
}

std::vector<MentionCandidate> CapitalizationMentionExtractor::extract(
    const std::vector<std::string> &sentences) {
  std::vector<MentionCandidate> out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const std::string &s = sentences[i];
    std::vector<Token> run;
    for (auto &t : tokenize(s)) {
      const bool cap = !t.core.empty() && is_upper(t.core[0]);
      if (!cap) {
        flush_run(s, run, i, out);
        continue;
      }
      // A possessive closes the name it belongs to.
      const bool possessive = strip_possessive(t.core) != t.core;
      const bool brk = t.breaks_after || possessive;
      run.push_back(std::move(t));
      if (brk) flush_run(s, run, i, out);
    }
    flush_run(s, run, i, out);
  }
  return out;
}

std::vector<MentionCandidate> LlmMentionExtractor::extract(
    const std::vector<std::string> &sentences) {
  if (sentences.empty()) return {};
  auto r = gateway_.complete_structured("ner_extract",
                                        {{"sentences", text::numbered_lines(sentences)}});
  std::vector<MentionCandidate> out;
  for (const auto &m : r.parsed["mentions"]) {
    std::string surface = text::trim(m["surface"].get<std::string>());
    long idx = m["sentence_index"].get<long>();
    if (idx < 0 || static_cast<size_t>(idx) >= sentences.size()) continue;
    if (find_word_bounded(sentences[static_cast<size_t>(idx)], surface).empty()) continue;
    out.push_back({surface, static_cast<size_t>(idx), MentionSource::kNer, ""});
  }
  return out;
}

std::vector<MentionCandidate> extract_entities(const EpisodeDocument &doc,
                                               MentionExtractor &extractor,
                                               LlmGateway &gateway) {
  if (doc.status < DocStatus::kResolved)
    throw Error("STAGE_ORDER", "extract_entities needs a resolved document");
  auto mentions = extractor.extract(doc.resolved);
  if (mentions.empty()) return {};

  std::vector<std::string> order;
  std::map<std::string, size_t> counts;
  for (const auto &m : mentions)
    if (counts[m.surface]++ == 0) order.push_back(m.surface);
  std::string candidates;
  for (const auto &s : order)
    candidates += "- " + s + " (" + std::to_string(counts[s]) +
                  (counts[s] == 1 ? " mention)\n" : " mentions)\n");
  if (!candidates.empty()) candidates.pop_back();

  auto r = gateway.complete_structured("refine_entities",
                                       {{"series", doc.series.str()},
                                        {"candidates", candidates},
                                        {"sentences", text::numbered_lines(doc.resolved)}});
  std::vector<MentionCandidate> out;
  std::vector<MentionCandidate> added;
  for (const auto &entity : r.parsed["entities"]) {
    const std::string key = text::trim(entity["preferred"].get<std::string>());
    std::set<std::string> seen;
    for (const auto &sj : entity["surfaces"]) {
      const std::string surface = text::trim(sj.get<std::string>());
      if (surface.empty() || !seen.insert(surface).second) continue;
      if (counts.count(surface)) {
        for (const auto &m : mentions)
          if (m.surface == surface) out.push_back({m.surface, m.sentence_index, m.source, key});
        continue;
      }
      for (size_t i = 0; i < doc.resolved.size(); ++i)
        for (size_t k = 0; k < find_word_bounded(doc.resolved[i], surface).size(); ++k)
          added.push_back({surface, i, MentionSource::kLlmRefinement, key});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.sentence_index < b.sentence_index;
  });
  out.insert(out.end(), added.begin(), added.end());
  return out;
}

void to_json(nlohmann::json &j, const NormalizationResult &r) {
  j = {{"surface_to_character", r.surface_to_character},
       {"created", r.created},
       {"extended", r.extended}};
}

NormalizationResult normalize_characters(const std::vector<MentionCandidate> &candidates,
                                         const SeriesId &series, RelationalStore &store) {
  NormalizationResult result;
  // Proto-entities in order of first appearance.
  std::vector<std::string> keys;
  std::map<std::string, std::vector<std::string>> surfaces;
  std::map<std::string, std::string> claimed_by;  // folded surface -> key
  for (const auto &c : candidates) {
    const std::string key = c.entity_key.empty() ? c.surface : c.entity_key;
    if (!surfaces.count(key)) keys.push_back(key);
    auto &list = surfaces[key];
    const std::string folded = fold_appellation(c.surface);
    auto [it, inserted] = claimed_by.emplace(folded, key);
    if (!inserted && it->second != key)
      throw Error("CONFLICT", "surface '" + c.surface + "' is claimed by both '" + it->second +
                                  "' and '" + key + "'");
    if (std::find(list.begin(), list.end(), c.surface) == list.end()) list.push_back(c.surface);
  }

  auto longer = [](const std::string &a, const std::string &b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  };
  for (const auto &key : keys) {
    auto group = surfaces[key];
    std::sort(group.begin(), group.end(), longer);
    std::map<std::string, std::string> owner;  // surface -> existing character_id
    std::optional<Character> primary;
    for (const auto &s : group) {
      if (auto c = store.find_by_appellation(series, s)) {
        owner[s] = c->character_id;
        if (!primary) primary = *c;  // owner of the longest matched surface
      }
    }
    if (!primary) {
      Character c;
      c.series = series;
      c.preferred_name = group.front();
      const std::string base = fold_appellation(c.preferred_name);
      c.character_id = derive_id(IdKind::kCharacter, series, base);
      for (int n = 2; store.find_character(c.character_id); ++n)
        c.character_id = derive_id(IdKind::kCharacter, series, base + "#" + std::to_string(n));
      for (const auto &s : group) c.add_appellation(s);
      store.save_character(c);
      result.created.push_back(c.character_id);
      for (const auto &s : group) result.surface_to_character[s] = c.character_id;
      continue;
    }
    bool changed = false;
    for (const auto &s : group) {
      if (owner.count(s)) {
        result.surface_to_character[s] = owner[s];
        continue;
      }
      changed = primary->add_appellation(s) || changed;
      result.surface_to_character[s] = primary->character_id;
    }
    if (changed) {
      store.save_character(*primary);
      result.extended.push_back(primary->character_id);
    }
  }
  return result;
}

EpisodeDocument substitute_names(const EpisodeDocument &doc,
                                 const std::map<std::string, std::string> &surface_to_preferred) {
  if (doc.status < DocStatus::kResolved)
    throw Error("STAGE_ORDER", "substitute_names needs a resolved document");
  std::map<std::string, std::string> replace = surface_to_preferred;
  for (const auto &[surface, preferred] : surface_to_preferred) replace.emplace(preferred, preferred);
  std::vector<std::pair<std::string, std::string>> patterns(replace.begin(), replace.end());
  std::stable_sort(patterns.begin(), patterns.end(), [](const auto &a, const auto &b) {
    return a.first.size() > b.first.size();
  });

  EpisodeDocument out = doc;
  out.normalized.clear();
  for (const auto &sentence : doc.resolved) {
    std::string res;
    size_t i = 0;
    while (i < sentence.size()) {
      bool hit = false;
      if (i == 0 || !text::is_word_char(sentence[i - 1])) {
        for (const auto &[from, to] : patterns) {
          if (!from.empty() && sentence.compare(i, from.size(), from) == 0 &&
              text::at_word_boundary(sentence, i, from.size())) {
            res += to;
            i += from.size();
            hit = true;
            break;
          }
        }
      }
      if (!hit) res.push_back(sentence[i++]);
    }
    out.normalized.push_back(std::move(res));
  }
  out.status = DocStatus::kNormalized;
  return out;
}

std::set<std::string> appellation_tokens(const Character &character) {
  std::set<std::string> tokens;
  auto add_all = [&](const std::string &name) {
    std::string cur;
    for (size_t i = 0; i <= name.size(); ++i) {
      const char c = i < name.size() ? name[i] : ' ';
      if (std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80) {
        cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      } else {
        if (!cur.empty() && cur != "dr" && cur != "mr" && cur != "mrs" && cur != "ms")
          tokens.insert(cur);
        cur.clear();
      }
    }
  };
  for (const auto &a : character.appellations) add_all(a);
  add_all(character.preferred_name);
  return tokens;
}

void to_json(nlohmann::json &j, const DuplicateSuggestion &s) {
  j = {{"character_a", s.character_a}, {"character_b", s.character_b}, {"score", s.score}};
}

std::vector<DuplicateSuggestion> suggest_duplicate_characters(const RelationalStore &store,
                                                              const SeriesId &series,
                                                              double threshold) {
  auto chars = store.list_characters(series);
  std::sort(chars.begin(), chars.end(),
            [](const auto &a, const auto &b) { return a.character_id < b.character_id; });
  std::vector<std::set<std::string>> tokens;
  for (const auto &c : chars) tokens.push_back(appellation_tokens(c));
  std::vector<DuplicateSuggestion> out;
  for (size_t a = 0; a < chars.size(); ++a)
    for (size_t b = a + 1; b < chars.size(); ++b) {
      double score = jaccard_similarity(tokens[a], tokens[b]);
      if (score >= threshold)
        out.push_back({chars[a].character_id, chars[b].character_id, score});
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto &x, const auto &y) { return x.score > y.score; });
  return out;
}

}  // namespace narrmem
