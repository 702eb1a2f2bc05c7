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

#include "narrmem/core/ids.hpp"

#include <openssl/evp.h>

#include <memory>

#include "narrmem/core/error.hpp"

namespace narrmem {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("HASH_FAILURE", "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string derive_id(IdKind kind, const SeriesId &series, std::string_view discriminator) {
  if (discriminator.empty()) throw Error("EMPTY_DISCRIMINATOR", "id discriminator is empty");
  const char *prefix = "arc";
  switch (kind) {
    case IdKind::kArc:
      prefix = "arc";
      break;
    case IdKind::kProgression:
      prefix = "prog";
      break;
    case IdKind::kCharacter:
      prefix = "char";
      break;
    case IdKind::kEmbedding:
      prefix = "emb";
      break;
  }
  std::string material;
  material.append(prefix).push_back('\0');
  material.append(series.str()).push_back('\0');
  material.append(discriminator);
  return std::string(prefix) + "_" + sha256_hex(material).substr(0, 24);
}

std::string new_progression_id(const NarrativeArc &arc, const EpisodeKey &episode) {
  const std::string disc = arc.arc_id + "/" + episode.str();
  auto taken = [&](const std::string &id) {
    for (const auto &p : arc.progressions)
      if (p.progression_id == id) return true;
    return false;
  };
  std::string id = derive_id(IdKind::kProgression, arc.series, disc);
  for (int n = 2; taken(id); ++n)
    id = derive_id(IdKind::kProgression, arc.series, disc + "#" + std::to_string(n));
  return id;
}

}  // namespace narrmem
