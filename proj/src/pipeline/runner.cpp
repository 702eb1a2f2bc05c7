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


#include "narrmem/pipeline/runner.hpp"

#include <fstream>
#include <set>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"

namespace narrmem {

using nlohmann::json;
namespace fs = std::filesystem;

std::string agent_name(int n) {
  static const char *kNames[] = {"identify_existing",   "extract_anthology",
                                 "extract_serial",      "optimize_season",
                                 "deduplicate",         "enhance_details",
                                 "verify_progressions", "verify_roles",
                                 "final_review_and_commit"};
  if (n < 1 || n > kAgentCount) throw Error("INVALID_AGENT", "no agent " + std::to_string(n));
  return kNames[n - 1];
}

void to_json(json &j, const EpisodeExtractionResult &r) {
  j = json{{"episode", r.episode},
           {"committed_arcs", r.committed_arcs},
           {"new_arcs", r.new_arcs},
           {"continued_arcs", r.continued_arcs},
           {"agent_trace", r.agent_trace},
           {"status", r.status}};
}

void from_json(const json &j, EpisodeExtractionResult &r) {
  j.at("episode").get_to(r.episode);
  j.at("committed_arcs").get_to(r.committed_arcs);
  j.at("new_arcs").get_to(r.new_arcs);
  j.at("continued_arcs").get_to(r.continued_arcs);
  r.agent_trace = j.at("agent_trace");
  r.status = j.value("status", "completed");
}

fs::path checkpoint_path(const fs::path &dir, const SeriesId &series, const EpisodeKey &episode) {
  return dir / series.str() / (episode.str() + ".checkpoint.json");
}

void check_episode_order(const RelationalStore &store, const SeriesId &series,
                         const EpisodeKey &episode) {
  auto done = store.processed_episodes(series);
  std::set<EpisodeKey> have(done.begin(), done.end());
  std::vector<std::string> missing;
  for (int e = 1; e < episode.episode; ++e)
    if (!have.count(EpisodeKey(episode.season, e))) missing.push_back(EpisodeKey(episode.season, e).str());
  if (!missing.empty()) {
    std::string list;
    for (const auto &m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error("ORDERING", episode.str() + " needs earlier episodes processed first: " + list);
  }
}

std::vector<std::string> retract_episode(MemoryStores &stores, const EmbeddingProvider &embedder,
                                         const SeriesId &series, const EpisodeKey &episode,
                                         bool embed_utterances) {
  std::vector<std::string> touched;
  for (auto arc : stores.relational().list_arcs(series)) {
    const Progression *p = arc.find_progression(episode);
    if (!p) continue;
    touched.push_back(arc.arc_id);
    stores.vectors().remove(TargetKind::kProgression, p->progression_id);
    for (const auto &u : p->content)
      stores.vectors().remove(TargetKind::kUtterance,
                              p->progression_id + "#" + std::to_string(u.ordinal));
    std::erase_if(arc.progressions, [&](const Progression &q) { return q.episode == episode; });
    if (arc.progressions.empty()) {
      stores.delete_arc(arc.arc_id);
      continue;
    }
    stores.relational().save_arc(arc);
    reembed_arc(stores, embedder, arc, embed_utterances);
  }
  return touched;
}

namespace {

struct Checkpoint {
  int completed = 0;  // agents fully done
  std::string doc_digest;
  std::vector<FlaggedArc> flagged;
  std::vector<ArcDraft> drafts;
  json trace = json::array();
  // Agent 9 progress.
  bool reviewed = false;
  json review_log = json::object();
  size_t next_commit = 0;
  EpisodeExtractionResult partial;
  json commits = json::array();
  json failed = json::array();
};

json to_json_cp(const Checkpoint &c) {
  return json{{"completed", c.completed},   {"doc_digest", c.doc_digest},
              {"flagged", c.flagged},       {"drafts", c.drafts},
              {"trace", c.trace},           {"reviewed", c.reviewed},
              {"review_log", c.review_log}, {"next_commit", c.next_commit},
              {"partial", c.partial},       {"commits", c.commits},
              {"failed", c.failed}};
}

Checkpoint from_json_cp(const json &j) {
  Checkpoint c;
  c.completed = j.at("completed").get<int>();
  c.doc_digest = j.at("doc_digest").get<std::string>();
  c.flagged = j.at("flagged").get<std::vector<FlaggedArc>>();
  c.drafts = j.at("drafts").get<std::vector<ArcDraft>>();
  c.trace = j.at("trace");
  c.reviewed = j.at("reviewed").get<bool>();
  c.review_log = j.at("review_log");
  c.next_commit = j.at("next_commit").get<size_t>();
  c.partial = j.at("partial").get<EpisodeExtractionResult>();
  c.commits = j.at("commits");
  c.failed = j.at("failed");
  return c;
}

void write_file_atomic(const fs::path &path, const std::string &body) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IO_ERROR", "cannot write " + tmp.string());
    out << body;
    if (!out) throw Error("IO_ERROR", "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string doc_digest(const EpisodeDocument &doc) {
  return sha256_hex(json(doc).dump());
}

json trace_entry(int n, const AgentLog &log) {
  return json{{"agent", n},
              {"name", agent_name(n)},
              {"output", log.output},
              {"fingerprints", log.fingerprints},
              {"notes", log.notes}};
}

bool is_storage_error(const std::string &code) {
  return code == "STORAGE_ERROR" || code == "CONSTRAINT_VIOLATION" ||
         code == "UNKNOWN_CHARACTER" || code == "INVALID_ARC";
}

}  // namespace

EpisodeExtractionResult run_episode(const PipelineContext &ctx, const EpisodeDocument &doc,
                                    const RunOptions &options) {
  ctx.config.validate();
  auto emit = [&](json ev) {
    if (!options.on_event) return;
    ev["series"] = doc.series.str();
    ev["episode"] = doc.episode.str();
    options.on_event(ev);
  };
  if (doc.status < DocStatus::kNormalized)
    throw Error("STAGE_ORDER", doc.episode.str() + " must be normalized before extraction, got " +
                                   to_string(doc.status));
  auto &store = ctx.stores.relational();

  if (!options.force) {
    if (auto prior = store.processed_result(doc.series, doc.episode)) {
      auto r = prior->get<EpisodeExtractionResult>();
      r.status = "no_op";
      emit({{"event", "run_completed"}, {"status", "no_op"}});
      return r;
    }
  }
  check_episode_order(store, doc.series, doc.episode);

  std::optional<fs::path> cp_file;
  if (options.checkpoint_dir) cp_file = checkpoint_path(*options.checkpoint_dir, doc.series, doc.episode);
  const std::string digest = doc_digest(doc);

  Checkpoint cp;
  bool resumed = false;
  if (cp_file && fs::exists(*cp_file) && !options.force) {
    std::ifstream in(*cp_file);
    try {
      Checkpoint prior = from_json_cp(json::parse(in));
      if (prior.doc_digest == digest) {
        cp = std::move(prior);
        resumed = true;
      }
    } catch (const std::exception &) {
      // Unreadable checkpoint: start over.
    }
  }
  if (!resumed) {
    cp = Checkpoint{};
    cp.doc_digest = digest;
    cp.partial.episode = doc.episode;
    // A fresh start replaces whatever an earlier run of this episode stored.
    store.transaction([&] {
      retract_episode(ctx.stores, ctx.embedder, doc.series, doc.episode,
                      ctx.config.embed_utterances);
    });
    store.clear_processed(doc.series, doc.episode);
  }
  auto save_cp = [&] {
    if (cp_file) write_file_atomic(*cp_file, to_json_cp(cp).dump(2) + "\n");
  };

  emit({{"event", "run_started"}, {"resumed_after_agent", resumed ? cp.completed : 0}});
  try {
    for (int n = cp.completed + 1; n <= 8; ++n) {
      AgentLog log;
      switch (n) {
        case 1:
          cp.flagged = agent1_identify_existing(ctx, doc, log);
          break;
        case 2:
          cp.drafts = agent2_extract_anthology(ctx, doc, log);
          break;
        case 3: {
          auto serial = agent3_extract_serial(ctx, doc, cp.flagged, log);
          cp.drafts.insert(cp.drafts.end(), serial.begin(), serial.end());
          break;
        }
        case 4:
          cp.drafts = agent4_optimize_season(ctx, doc, std::move(cp.drafts), log);
          break;
        case 5:
          cp.drafts = agent5_deduplicate(ctx, doc, std::move(cp.drafts), log);
          break;
        case 6:
          cp.drafts = agent6_enhance_details(ctx, doc, std::move(cp.drafts), log);
          break;
        case 7:
          cp.drafts = agent7_verify_progressions(ctx, doc, std::move(cp.drafts), log);
          break;
        case 8:
          cp.drafts = agent8_verify_roles(ctx, doc, std::move(cp.drafts), log);
          break;
      }
      cp.trace.push_back(trace_entry(n, log));
      cp.completed = n;
      save_cp();
      emit({{"event", "agent_completed"}, {"agent", n}, {"name", agent_name(n)}});
    }

    // Agent 9: review once, then commit draft by draft.
    if (!cp.reviewed) {
      AgentLog log;
      cp.drafts = agent9_final_review(ctx, doc, std::move(cp.drafts), log);
      cp.review_log = trace_entry(9, log);
      cp.reviewed = true;
      save_cp();
    }
    while (cp.next_commit < cp.drafts.size()) {
      const ArcDraft &d = cp.drafts[cp.next_commit];
      try {
        // semantic_commit opens its own transaction around the writes; the
        // adjudication calls before them run without holding the store.
        CommitOutcome o = semantic_commit(ctx, doc.series, doc.episode, d);
        json oj = o;
        oj["draft"] = d.provisional_id;
        oj["draft_utterances"] = d.progression_content.size();
        cp.commits.push_back(oj);
        cp.partial.committed_arcs.push_back(o.arc_id);
        if (o.kind == CommitOutcome::Kind::kCreated)
          ++cp.partial.new_arcs;
        else
          ++cp.partial.continued_arcs;
      } catch (const Error &e) {
        if (!is_storage_error(e.code())) throw;
        cp.failed.push_back({{"draft", d.provisional_id}, {"code", e.code()}, {"error", e.what()}});
      }
      ++cp.next_commit;
      save_cp();
    }
  } catch (const Error &e) {
    ctx.stores.flush();
    emit({{"event", "run_failed"},
          {"code", e.code()},
          {"message", e.what()},
          {"last_completed_agent", cp.completed}});
    throw;
  }

  json entry = cp.review_log;
  json review_output = entry["output"];
  entry["output"] = json{{"review", review_output}, {"commits", cp.commits}, {"failed", cp.failed}};
  for (const auto &c : cp.commits)
    for (const auto &f : c["fingerprints"]) entry["fingerprints"].push_back(f);
  for (const auto &c : cp.commits)
    for (const auto &nt : c["notes"]) entry["notes"].push_back(nt);
  if (!cp.failed.empty()) entry["notes"].push_back("PARTIAL_COMMIT");

  EpisodeExtractionResult result = cp.partial;
  result.episode = doc.episode;
  result.agent_trace = cp.trace;
  result.agent_trace.push_back(entry);
  result.status = cp.failed.empty() ? "completed" : "partial";

  store.mark_processed(doc.series, doc.episode, json(result));
  ctx.stores.flush();
  if (cp_file) {
    std::error_code ec;
    fs::remove(*cp_file, ec);
  }
  emit({{"event", "agent_completed"}, {"agent", 9}, {"name", agent_name(9)}});
  emit({{"event", "run_completed"},
        {"status", result.status},
        {"new_arcs", result.new_arcs},
        {"continued_arcs", result.continued_arcs}});
  return result;
}

}  // namespace narrmem
