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

#ifndef NARRMEM_CORE_TEXT_HPP_
#define NARRMEM_CORE_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace narrmem::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Collapses internal runs of whitespace to one space and trims.
std::string collapse_whitespace(std::string_view s);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

inline bool is_word_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') ||
         u == '_' || u >= 0x80;
}

// True when [pos, pos+len) in `s` is not flanked by word characters.
bool at_word_boundary(std::string_view s, size_t pos, size_t len);

// Lines of the form "[index] text" joined by '\n'.
std::string numbered_lines(const std::vector<std::string> &lines, size_t first_index = 0);

}  // namespace narrmem::text

#endif  // NARRMEM_CORE_TEXT_HPP_
