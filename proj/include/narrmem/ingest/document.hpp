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

#ifndef NARRMEM_INGEST_DOCUMENT_HPP_
#define NARRMEM_INGEST_DOCUMENT_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/types.hpp"

namespace narrmem {

enum class DocStatus { kLoaded = 0, kSimplified = 1, kResolved = 2, kNormalized = 3 };

std::string to_string(DocStatus status);
DocStatus parse_doc_status(const std::string &s);

// One episode's plot as it moves through preprocessing. Each stage reads the
// previous stage's field and writes only its own.
struct EpisodeDocument {
  SeriesId series;
  EpisodeKey episode;
  std::string source_path;
  std::string raw_text;
  std::vector<std::string> sentences;   // segmented raw text
  std::vector<std::string> simplified;  // one event per sentence
  std::vector<std::string> resolved;    // pronouns replaced by names
  std::vector<std::string> normalized;  // names replaced by preferred names
  // surface form -> character_id, filled by normalization.
  std::map<std::string, std::string> character_map;
  DocStatus status = DocStatus::kLoaded;

  // The normalized plot as one text block.
  std::string normalized_plot() const;

  friend bool operator==(const EpisodeDocument &, const EpisodeDocument &) = default;
};

void to_json(nlohmann::json &j, const EpisodeDocument &d);
void from_json(const nlohmann::json &j, EpisodeDocument &d);

// Rule-based splitter on . ? ! (and blank lines) with guards for common
// abbreviations and single-letter initials. Sentences are trimmed substrings
// of the input, in order.
std::vector<std::string> segment_sentences(const std::string &raw_text);

// Episode key from a file name starting with "S<season>E<episode>". KEY_PARSE.
EpisodeKey episode_key_from_filename(const std::string &filename);

// Errors: IO_ERROR, KEY_PARSE, EMPTY_PLOT.
EpisodeDocument load_episode(const std::filesystem::path &path, const SeriesId &series);

void save_document(const EpisodeDocument &doc, const std::filesystem::path &path);
EpisodeDocument load_document(const std::filesystem::path &path);

}  // namespace narrmem

#endif  // NARRMEM_INGEST_DOCUMENT_HPP_
