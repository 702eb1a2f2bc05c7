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


#include "narrmem/service/api.hpp"

#include <httplib.h>

#include <chrono>
#include <unordered_map>

#include "narrmem/core/error.hpp"
#include "narrmem/ingest/entities.hpp"
#include "narrmem/service/curation.hpp"

namespace narrmem {

using nlohmann::json;

int http_status(const std::string &code) {
  static const std::set<std::string> k400 = {"VALIDATION_FAILED", "BAD_REQUEST", "ORDERING",
                                             "STAGE_ORDER", "SCHEMA_VIOLATION"};
  static const std::set<std::string> k404 = {"UNKNOWN_ID", "UNKNOWN_EPISODE", "NOT_FOUND"};
  static const std::set<std::string> k409 = {"MERGE_CONFLICT", "APPELLATION_CONFLICT",
                                             "RUN_ACTIVE", "CONFLICT"};
  static const std::set<std::string> k503 = {"UNAVAILABLE", "TRANSPORT_ERROR", "REPLAY_MISS"};
  if (k400.count(code) || code.starts_with("INVALID_") || code.starts_with("EMPTY_")) return 400;
  if (k404.count(code)) return 404;
  if (k409.count(code)) return 409;
  if (k503.count(code)) return 503;
  return 500;
}

// --- RunRegistry -----------------------------------------------------------

RunRegistry::~RunRegistry() { join_all(); }

std::string RunRegistry::start(const SeriesId &series, int season, Job job) {
  std::lock_guard lock(mu_);
  if (active_.count(series))
    throw Error("RUN_ACTIVE", "a pipeline run is already active for " + series.str());
  std::string id = "run-" + std::to_string(next_++);
  auto run = std::make_unique<Run>();
  run->snap.run_id = id;
  run->snap.series = series;
  run->snap.season = season;
  run->snap.state = "running";
  Run *raw = run.get();
  runs_.emplace(id, std::move(run));
  active_.insert(series);
  raw->worker = std::thread([this, raw, job = std::move(job)] {
    auto emit = [this, raw](const json &event) {
      std::lock_guard l(mu_);
      json e = event;
      e["run_id"] = raw->snap.run_id;
      e["seq"] = raw->snap.events.size();
      raw->snap.events.push_back(std::move(e));
      cv_.notify_all();
    };
    json results;
    json error;
    try {
      results = job(emit);
    } catch (const Error &e) {
      error = {{"error", e.code()}, {"message", e.what()}};
    } catch (const std::exception &e) {
      error = {{"error", "INTERNAL"}, {"message", e.what()}};
    }
    std::lock_guard l(mu_);
    auto &snap = raw->snap;
    if (error.is_null()) {
      snap.state = "completed";
      snap.results = std::move(results);
    } else {
      snap.state = "failed";
      snap.error = error;
      // The runner reports its own failures; anything else (preprocessing,
      // missing documents) gets a terminal event here.
      if (snap.events.empty() || snap.events.back().value("event", "") != "run_failed")
        snap.events.push_back({{"event", "run_failed"},
                               {"series", snap.series},
                               {"code", error["error"]},
                               {"message", error["message"]},
                               {"run_id", snap.run_id},
                               {"seq", snap.events.size()}});
    }
    active_.erase(snap.series);
    cv_.notify_all();
  });
  return id;
}

bool RunRegistry::active(const SeriesId &series) const {
  std::lock_guard lock(mu_);
  return active_.count(series) > 0;
}

RunRegistry::Snapshot RunRegistry::snapshot(const std::string &run_id) const {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) throw Error("UNKNOWN_ID", "no run " + run_id);
  return it->second->snap;
}

std::pair<std::vector<json>, bool> RunRegistry::wait_events(
    const std::string &run_id, size_t from, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) throw Error("UNKNOWN_ID", "no run " + run_id);
  const Snapshot &s = it->second->snap;
  cv_.wait_for(lock, timeout, [&] { return s.events.size() > from || s.state != "running"; });
  std::vector<json> out;
  for (size_t i = from; i < s.events.size(); ++i) out.push_back(s.events[i]);
  return {std::move(out), s.state != "running"};
}

void RunRegistry::join_all() {
  std::vector<std::thread *> workers;
  {
    std::lock_guard lock(mu_);
    for (auto &[id, run] : runs_)
      if (run->worker.joinable()) workers.push_back(&run->worker);
  }
  for (auto *w : workers) w->join();
}

json to_json_status(const RunRegistry::Snapshot &s) {
  return json{{"run_id", s.run_id}, {"series", s.series},          {"season", s.season},
              {"state", s.state},   {"events", s.events.size()},   {"results", s.results},
              {"error", s.error}};
}

// --- ApiServer ---------------------------------------------------------------

namespace {

json parse_body(const httplib::Request &req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error &e) {
    throw Error("BAD_REQUEST", std::string("malformed JSON body: ") + e.what());
  }
}

void send_json(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, const std::string &code, const std::string &message,
                json extra = json::object()) {
  extra["error"] = code;
  extra["message"] = message;
  send_json(res, http_status(code), extra);
}

std::optional<double> query_double(const httplib::Request &req, const char *name) {
  if (!req.has_param(name)) return std::nullopt;
  std::string v = req.get_param_value(name);
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  throw Error("BAD_REQUEST", std::string("query parameter ") + name + " is not a number");
}

std::optional<GatewayMode> body_mode(const json &body) {
  if (!body.contains("mode") || body["mode"].is_null()) return std::nullopt;
  return parse_gateway_mode(body["mode"].get<std::string>());
}

}  // namespace

struct ApiServer::Impl {
  Workspace &ws;
  Curation cur;
  RunRegistry runs;
  httplib::Server svr;
  std::thread thread;
  std::mutex locks_mu;
  std::unordered_map<std::string, std::unique_ptr<std::mutex>> series_locks;

  explicit Impl(Workspace &w)
      : ws(w), cur{w.stores(), w.embedder(), w.config().pipeline.embed_utterances} {
    routes();
  }

  std::mutex &series_mutex(const SeriesId &s) {
    std::lock_guard l(locks_mu);
    auto &m = series_locks[s.str()];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  // Serializes mutations of one series and refuses them during a run.
  std::unique_lock<std::mutex> writer(const SeriesId &s) {
    std::unique_lock lock(series_mutex(s));
    if (runs.active(s))
      throw Error("RUN_ACTIVE", "series " + s.str() + " is being extracted; retry later");
    return lock;
  }

  SeriesId arc_series(const std::string &arc_id) {
    return ws.stores().relational().load_arc(arc_id).series;
  }

  using Handler = std::function<void(const httplib::Request &, httplib::Response &)>;

  static Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request &req, httplib::Response &res) {
      try {
        h(req, res);
      } catch (const ValidationFailed &e) {
        json codes = violation_codes(e.report());
        send_error(res, e.code(), e.what(), {{"violations", e.report()}, {"codes", codes}});
      } catch (const Error &e) {
        send_error(res, e.code(), e.what());
      } catch (const json::exception &e) {
        send_error(res, "BAD_REQUEST", e.what());
      } catch (const std::exception &e) {
        send_error(res, "INTERNAL", e.what());
      }
    };
  }

  void routes() {
    auto &rel = ws.stores().relational();

    svr.Get("/api/health", guarded([](const auto &, auto &res) {
      send_json(res, 200, {{"status", "ok"}});
    }));

    svr.Get("/api/series", guarded([&rel](const auto &, auto &res) {
      send_json(res, 200, rel.list_series());
    }));

    svr.Get(R"(/api/series/([^/]+)/seasons/(\d+)/arcs)",
            guarded([this](const httplib::Request &req, httplib::Response &res) {
              SeriesId s(req.matches[1].str());
              int season = std::stoi(req.matches[2].str());
              std::optional<ArcType> type;
              if (req.has_param("type") && !req.get_param_value("type").empty())
                type = json(req.get_param_value("type")).get<ArcType>();
              std::optional<std::string> character;
              if (req.has_param("character") && !req.get_param_value("character").empty())
                character = req.get_param_value("character");
              send_json(res, 200, cur.timeline(s, season, type, character));
            }));

    // --- arcs
    svr.Post("/api/arcs/merge", guarded([this](const httplib::Request &req, httplib::Response &res) {
      json body = parse_body(req);
      std::string keep = body.at("keep_id").get<std::string>();
      std::string absorb = body.at("absorb_id").get<std::string>();
      auto lock = writer(arc_series(keep));
      send_json(res, 200, cur.merge_arcs(keep, absorb));
    }));

    svr.Post("/api/arcs", guarded([this](const httplib::Request &req, httplib::Response &res) {
      json body = parse_body(req);
      auto lock = writer(body.at("series").get<SeriesId>());
      send_json(res, 201, cur.create_arc(body));
    }));

    svr.Get(R"(/api/arcs/([^/]+))", guarded([&rel](const httplib::Request &req, auto &res) {
      send_json(res, 200, rel.load_arc(req.matches[1].str()));
    }));

    svr.Patch(R"(/api/arcs/([^/]+))",
              guarded([this](const httplib::Request &req, httplib::Response &res) {
                std::string id = req.matches[1].str();
                json body = parse_body(req);
                auto lock = writer(arc_series(id));
                send_json(res, 200, cur.patch_arc(id, body));
              }));

    svr.Delete(R"(/api/arcs/([^/]+))",
               guarded([this](const httplib::Request &req, httplib::Response &res) {
                 std::string id = req.matches[1].str();
                 auto lock = writer(arc_series(id));
                 cur.delete_arc(id);
                 send_json(res, 200, {{"deleted", id}});
               }));

    // --- progressions
    svr.Post(R"(/api/arcs/([^/]+)/progressions/generate)",
             guarded([this](const httplib::Request &req, httplib::Response &res) {
               std::string id = req.matches[1].str();
               json body = parse_body(req);
               auto arc = ws.stores().relational().load_arc(id);
               auto ep = body.at("episode").get<EpisodeKey>();
               auto doc = ws.find_document(arc.series, ep);
               if (!doc)
                 throw Error("UNKNOWN_EPISODE",
                             "no staged document for " + arc.series.str() + " " + ep.str());
               send_json(res, 200,
                         generate_progression(ws.gateway(body_mode(body)), ws.stores().relational(),
                                              arc, *doc));
             }));

    svr.Post(R"(/api/arcs/([^/]+)/progressions)",
             guarded([this](const httplib::Request &req, httplib::Response &res) {
               std::string id = req.matches[1].str();
               json body = parse_body(req);
               auto lock = writer(arc_series(id));
               send_json(res, 201, cur.add_progression(id, body));
             }));

    svr.Patch(R"(/api/arcs/([^/]+)/progressions/([^/]+))",
              guarded([this](const httplib::Request &req, httplib::Response &res) {
                std::string id = req.matches[1].str();
                json body = parse_body(req);
                auto lock = writer(arc_series(id));
                send_json(res, 200, cur.patch_progression(id, req.matches[2].str(), body));
              }));

    svr.Delete(R"(/api/arcs/([^/]+)/progressions/([^/]+))",
               guarded([this](const httplib::Request &req, httplib::Response &res) {
                 std::string id = req.matches[1].str();
                 auto lock = writer(arc_series(id));
                 send_json(res, 200, cur.delete_progression(id, req.matches[2].str()));
               }));

    // --- analytics
    svr.Get(R"(/api/series/([^/]+)/clusters)",
            guarded([this](const httplib::Request &req, httplib::Response &res) {
              double t = query_double(req, "threshold").value_or(ws.config().cluster_distance);
              send_json(res, 200, cur.clusters(SeriesId(req.matches[1].str()), t));
            }));

    svr.Get(R"(/api/series/([^/]+)/pca)",
            guarded([this](const httplib::Request &req, httplib::Response &res) {
              send_json(res, 200, cur.pca(SeriesId(req.matches[1].str())));
            }));

    // --- characters
    svr.Get(R"(/api/series/([^/]+)/characters/duplicates)",
            guarded([this](const httplib::Request &req, httplib::Response &res) {
              double t = query_double(req, "threshold").value_or(ws.config().jaccard_threshold);
              if (t < 0 || t > 1) throw Error("INVALID_THRESHOLD", "threshold must lie in [0, 1]");
              send_json(res, 200,
                        suggest_duplicate_characters(ws.stores().relational(),
                                                     SeriesId(req.matches[1].str()), t));
            }));

    svr.Get(R"(/api/series/([^/]+)/characters)",
            guarded([&rel](const httplib::Request &req, auto &res) {
              send_json(res, 200, rel.list_characters(SeriesId(req.matches[1].str())));
            }));

    svr.Post("/api/characters/merge",
             guarded([this](const httplib::Request &req, httplib::Response &res) {
               json body = parse_body(req);
               std::string keep = body.at("keep_id").get<std::string>();
               std::string absorb = body.at("absorb_id").get<std::string>();
               auto lock = writer(ws.stores().relational().load_character(keep).series);
               send_json(res, 200, cur.merge_characters(keep, absorb));
             }));

    svr.Patch(R"(/api/characters/([^/]+))",
              guarded([this](const httplib::Request &req, httplib::Response &res) {
                std::string id = req.matches[1].str();
                json body = parse_body(req);
                auto lock = writer(ws.stores().relational().load_character(id).series);
                send_json(res, 200, cur.patch_character(id, body));
              }));

    // --- pipeline
    svr.Post("/api/pipeline/run", guarded([this](const httplib::Request &req,
                                                 httplib::Response &res) {
      json body = parse_body(req);
      SeriesId series = body.at("series").get<SeriesId>();
      int season = body.at("season").get<int>();
      auto mode = body_mode(body);
      bool force = body.value("force", false);
      if (ws.documents(series, season).empty())
        throw Error("UNKNOWN_EPISODE",
                    "no staged documents for " + series.str() + " season " + std::to_string(season));
      std::unique_lock lock(series_mutex(series));
      std::string id = runs.start(series, season, [this, series, season, mode, force](
                                                      const EventSink &emit) {
        ws.preprocess(series, season, mode, false);
        emit({{"event", "preprocess_completed"}, {"series", series}, {"season", season}});
        json out = json::array();
        for (const auto &r : ws.extract(series, season, mode, force, emit))
          out.push_back({{"episode", r.episode},
                         {"status", r.status},
                         {"committed_arcs", r.committed_arcs},
                         {"new_arcs", r.new_arcs},
                         {"continued_arcs", r.continued_arcs}});
        return out;
      });
      send_json(res, 202, {{"run_id", id}, {"state", "running"}});
    }));

    svr.Get(R"(/api/pipeline/runs/([^/]+))",
            guarded([this](const httplib::Request &req, httplib::Response &res) {
              send_json(res, 200, to_json_status(runs.snapshot(req.matches[1].str())));
            }));

    svr.Get(R"(/api/pipeline/runs/([^/]+)/events)",
            guarded([this](const httplib::Request &req, httplib::Response &res) {
              std::string id = req.matches[1].str();
              runs.snapshot(id);  // 404 before streaming starts
              auto sent = std::make_shared<size_t>(0);
              res.set_chunked_content_provider(
                  "application/x-ndjson", [this, id, sent](size_t, httplib::DataSink &sink) {
                    auto [events, finished] =
                        runs.wait_events(id, *sent, std::chrono::milliseconds(500));
                    for (const auto &e : events) {
                      std::string line = e.dump() + "\n";
                      if (!sink.write(line.data(), line.size())) return false;
                      ++*sent;
                    }
                    if (finished) sink.done();
                    return true;
                  });
            }));

    svr.set_error_handler([](const httplib::Request &, httplib::Response &res) {
      if (res.body.empty() && res.status == 404)
        send_json(res, 404, {{"error", "NOT_FOUND"}, {"message", "no such endpoint"}});
    });
  }
};

ApiServer::ApiServer(Workspace &workspace) : impl_(std::make_unique<Impl>(workspace)) {}

ApiServer::~ApiServer() {
  stop();
  impl_->runs.join_all();
}

int ApiServer::start(const std::string &host, int port) {
  int bound = port == 0 ? impl_->svr.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->svr.bind_to_port(host, port)) bound = -1;
  if (bound < 0) throw Error("IO_ERROR", "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->svr.listen_after_bind(); });
  impl_->svr.wait_until_ready();
  return bound;
}

void ApiServer::listen(const std::string &host, int port) {
  if (!impl_->svr.listen(host, port))
    throw Error("IO_ERROR", "cannot listen on " + host + ":" + std::to_string(port));
}

void ApiServer::stop() {
  impl_->svr.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

RunRegistry &ApiServer::runs() { return impl_->runs; }

}  // namespace narrmem
