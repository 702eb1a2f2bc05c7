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

#include "narrmem/ingest/document.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "narrmem/core/error.hpp"
#include "narrmem/core/text.hpp"

namespace narrmem {

namespace {

constexpr const char *kStatusNames[] = {"loaded", "simplified", "resolved", "normalized"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_abbreviation(const std::string &text, size_t start, size_t dot) {
  static const std::set<std::string> kAbbrev = {
      "dr", "mr", "mrs", "ms", "st", "jr", "sr", "prof", "vs", "e.g", "i.e",
      "mt", "lt", "sgt", "capt", "col", "gen", "rev", "hon"};
  size_t b = dot;
  while (b > start && !is_space(text[b - 1])) --b;
  std::string token = text.substr(b, dot - b);
  while (!token.empty() && !std::isalpha(static_cast<unsigned char>(token.front())))
    token.erase(token.begin());
  return kAbbrev.count(text::to_lower(token)) > 0;
}

// Length of a closing quote or bracket at `pos`, or 0.
size_t closer_at(const std::string &s, size_t pos) {
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (s.compare(pos, 3, "\xE2\x80\x9D") == 0 || s.compare(pos, 3, "\xE2\x80\x99") == 0) return 3;
  return 0;
}

// True when a blank line starts at the newline `pos`.
bool blank_line_at(const std::string &s, size_t pos) {
  for (size_t j = pos + 1; j < s.size(); ++j) {
    if (s[j] == '\n') return true;
    if (!is_space(s[j])) return false;
  }
  return false;
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_string(DocStatus status) { return kStatusNames[static_cast<int>(status)]; }

DocStatus parse_doc_status(const std::string &s) {
  for (int i = 0; i < 4; ++i)
    if (s == kStatusNames[i]) return static_cast<DocStatus>(i);
  throw Error("INVALID_STATUS", "unknown document status '" + s + "'");
}

std::string EpisodeDocument::normalized_plot() const { return text::join(normalized, " "); }

void to_json(nlohmann::json &j, const EpisodeDocument &d) {
  j = {{"series", d.series},
       {"episode", d.episode},
       {"source_path", d.source_path},
       {"status", to_string(d.status)},
       {"raw_text", d.raw_text},
       {"sentences", d.sentences},
       {"simplified", d.simplified},
       {"resolved", d.resolved},
       {"normalized", d.normalized},
       {"character_map", d.character_map}};
}

void from_json(const nlohmann::json &j, EpisodeDocument &d) {
  d.series = j.at("series").get<SeriesId>();
  d.episode = j.at("episode").get<EpisodeKey>();
  d.source_path = j.value("source_path", "");
  d.status = parse_doc_status(j.at("status").get<std::string>());
  d.raw_text = j.at("raw_text").get<std::string>();
  d.sentences = j.value("sentences", std::vector<std::string>{});
  d.simplified = j.value("simplified", std::vector<std::string>{});
  d.resolved = j.value("resolved", std::vector<std::string>{});
  d.normalized = j.value("normalized", std::vector<std::string>{});
  d.character_map = j.value("character_map", std::map<std::string, std::string>{});
}

std::vector<std::string> segment_sentences(const std::string &text) {
  std::vector<std::string> out;
  auto emit = [&](size_t b, size_t e) {
    std::string s = text::trim(std::string_view(text).substr(b, e - b));
    if (!s.empty()) out.push_back(std::move(s));
  };
  size_t start = 0;
  const size_t n = text.size();
  for (size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c == '\n' && blank_line_at(text, i)) {
      emit(start, i);
      start = i;
      continue;
    }
    if (c != '.' && c != '?' && c != '!') continue;
    size_t j = i + 1;
    while (j < n && (text[j] == '.' || text[j] == '?' || text[j] == '!')) ++j;
    while (j < n) {
      size_t len = closer_at(text, j);
      if (!len) break;
      j += len;
    }
    if (j < n && !is_space(text[j])) continue;  // "3.5", "e.g.x", "Grey's."
    if (c == '.' && j == i + 1 && is_abbreviation(text, start, i)) continue;
    emit(start, j);
    start = j;
    i = j - 1;
  }
  emit(start, n);
  return out;
}

EpisodeKey episode_key_from_filename(const std::string &filename) {
  static const std::regex re(R"(^[Ss](\d+)[Ee](\d+))");
  std::smatch m;
  if (!std::regex_search(filename, m, re))
    throw Error("KEY_PARSE", "file name '" + filename + "' does not start with S<nn>E<nn>");
  try {
    return EpisodeKey(std::stoi(m[1].str()), std::stoi(m[2].str()));
  } catch (const Error &) {
    throw Error("KEY_PARSE", "file name '" + filename + "' has an invalid episode number");
  }
}

EpisodeDocument load_episode(const std::filesystem::path &path, const SeriesId &series) {
  EpisodeKey key = episode_key_from_filename(path.filename().string());
  EpisodeDocument doc;
  doc.series = series;
  doc.episode = key;
  doc.source_path = path.filename().string();
  doc.raw_text = read_text(path);
  if (text::trim(doc.raw_text).empty())
    throw Error("EMPTY_PLOT", "plot file " + path.string() + " is empty");
  doc.sentences = segment_sentences(doc.raw_text);
  doc.status = DocStatus::kLoaded;
  return doc;
}

void save_document(const EpisodeDocument &doc, const std::filesystem::path &path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IO_ERROR", "cannot write " + tmp.string());
    out << nlohmann::json(doc).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

EpisodeDocument load_document(const std::filesystem::path &path) {
  try {
    return nlohmann::json::parse(read_text(path)).get<EpisodeDocument>();
  } catch (const nlohmann::json::exception &e) {
    throw Error("IO_ERROR", "malformed document " + path.string() + ": " + e.what());
  }
}

}  // namespace narrmem
