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


// narrmem: batch verbs and the HTTP server over one workspace.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "narrmem/core/error.hpp"
#include "narrmem/ingest/entities.hpp"
#include "narrmem/service/api.hpp"
#include "narrmem/service/config.hpp"
#include "narrmem/service/curation.hpp"
#include "narrmem/service/workspace.hpp"

using nlohmann::json;
using namespace narrmem;

namespace {

ApiServer *g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int fail(const std::string &code, const std::string &message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"narrmem: narrative-arc memory for episodic series"};
  app.require_subcommand(1);

  std::string config_file, workspace, mode;
  app.add_option("--config", config_file, "JSON configuration file");
  app.add_option("--workspace", workspace, "Workspace directory (overrides config)");
  app.add_option("--mode", mode, "LLM gateway mode: live, replay or record")
      ->check(CLI::IsMember({"live", "replay", "record"}));

  std::string series, dir, gold, overrides, output, host, arc_id, episode;
  int season = 0, port = -1;
  size_t window = 0;
  double jaccard = -1;
  bool force = false, as_json = false, events = false;

  auto *ingest = app.add_subcommand("ingest", "Stage plot files S..E...txt from a directory");
  ingest->add_option("--series", series)->required();
  ingest->add_option("--dir", dir)->required()->check(CLI::ExistingDirectory);

  auto *pre = app.add_subcommand("preprocess", "Simplify, resolve pronouns, normalize names");
  pre->add_option("--series", series)->required();
  pre->add_option("--season", season);
  pre->add_flag("--force", force, "Redo stages already done");
  pre->add_option("--window", window, "Pronoun window in sentences, target included")
      ->check(CLI::PositiveNumber);

  auto *ext = app.add_subcommand("extract", "Run the arc pipeline over a season");
  ext->add_option("--series", series)->required();
  ext->add_option("--season", season)->required();
  ext->add_flag("--force", force, "Re-run processed episodes");
  ext->add_flag("--events", events, "Print agent events to stderr as JSON lines");
  std::string trace;
  ext->add_option("--trace", trace, "Write the full results with agent traces to a file");

  auto *dup = app.add_subcommand("duplicates", "Suggest character pairs that may be one person");
  dup->add_option("--series", series)->required();
  dup->add_option("--jaccard-threshold", jaccard, "Minimum token Jaccard score")
      ->check(CLI::Range(0.0, 1.0));

  auto *gen = app.add_subcommand("generate", "Draft a progression of a stored arc for review");
  gen->add_option("--arc", arc_id)->required();
  gen->add_option("--episode", episode, "Episode key such as S01E02")->required();

  auto *ev = app.add_subcommand("evaluate", "Score stored arcs against a gold standard");
  ev->add_option("--gold", gold)->required()->check(CLI::ExistingFile);
  ev->add_option("--overrides", overrides)->check(CLI::ExistingFile);
  ev->add_flag("--json", as_json, "Print the report as JSON");

  auto *exp = app.add_subcommand("export", "Canonical JSON dump of every series");
  exp->add_option("--output,-o", output, "Write to a file instead of stdout");

  auto *serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  CLI11_PARSE(app, argc, argv);

  try {
    ApiConfig cfg = ApiConfig::load(config_file.empty()
                                        ? std::nullopt
                                        : std::optional<std::filesystem::path>(config_file));
    if (!workspace.empty()) cfg.workspace = workspace;
    if (!mode.empty()) cfg.mode = parse_gateway_mode(mode);
    if (!host.empty()) cfg.host = host;
    if (port >= 0) cfg.port = port;
    if (window > 0) cfg.pronoun_window = window;
    if (jaccard >= 0) cfg.jaccard_threshold = jaccard;
    cfg.validate();
    Workspace ws(cfg);
    std::optional<int> season_opt = season > 0 ? std::optional<int>(season) : std::nullopt;

    if (*ingest) {
      json out = json::array();
      for (const auto &d : ws.ingest(dir, SeriesId(series)))
        out.push_back({{"episode", d.episode}, {"sentences", d.sentences.size()},
                       {"status", to_string(d.status)}});
      std::cout << out.dump(2) << "\n";
    } else if (*pre) {
      json out = json::array();
      for (const auto &d : ws.preprocess(SeriesId(series), season_opt, std::nullopt, force))
        out.push_back({{"episode", d.episode}, {"status", to_string(d.status)},
                       {"characters", d.character_map.size()}});
      std::cout << out.dump(2) << "\n";
    } else if (*ext) {
      EventSink sink;
      if (events) sink = [](const json &e) { std::cerr << e.dump() << "\n"; };
      json out = json::array();
      auto results = ws.extract(SeriesId(series), season, std::nullopt, force, sink);
      if (!trace.empty()) {
        std::ofstream f(trace, std::ios::binary);
        f << json(results).dump(2) << "\n";
        if (!f) return fail("IO_ERROR", "cannot write " + trace);
      }
      for (const auto &r : results)
        out.push_back({{"episode", r.episode}, {"status", r.status},
                       {"committed_arcs", r.committed_arcs}, {"new_arcs", r.new_arcs},
                       {"continued_arcs", r.continued_arcs}});
      std::cout << out.dump(2) << "\n";
    } else if (*dup) {
      std::cout << json(suggest_duplicate_characters(ws.stores().relational(), SeriesId(series),
                                                     cfg.jaccard_threshold))
                       .dump(2)
                << "\n";
    } else if (*gen) {
      NarrativeArc arc = ws.stores().relational().load_arc(arc_id);
      EpisodeKey ep = EpisodeKey::parse(episode);
      auto doc = ws.find_document(arc.series, ep);
      if (!doc) return fail("UNKNOWN_EPISODE", "no staged document for " + ep.str());
      std::cout << generate_progression(ws.gateway(), ws.stores().relational(), arc, *doc).dump(2)
                << "\n";
    } else if (*ev) {
      auto g = GoldStandard::load(gold);
      std::vector<MappingOverride> extra;
      if (!overrides.empty()) extra = load_overrides(overrides);
      auto report = ws.evaluate(g, extra);
      if (as_json)
        std::cout << json(report).dump(2) << "\n";
      else
        std::cout << render_table(report);
    } else if (*exp) {
      std::string text = ws.export_text();
      if (output.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(output, std::ios::binary);
        f << text;
        if (!f) return fail("IO_ERROR", "cannot write " + output);
      }
    } else if (*serve) {
      ApiServer server(ws);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "narrmem: serving on " << ws.config().host << ":" << ws.config().port << "\n";
      server.listen(ws.config().host, ws.config().port);
      g_server = nullptr;
    }
    ws.flush();
  } catch (const Error &e) {
    return fail(e.code(), e.what());
  } catch (const std::exception &e) {
    return fail("INTERNAL", e.what());
  }
  return 0;
}
