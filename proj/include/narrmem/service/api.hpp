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


// HTTP API over a Workspace. JSON in, JSON out; errors are
// {"error": CODE, "message": ...} with the status given by http_status().

#ifndef NARRMEM_SERVICE_API_HPP_
#define NARRMEM_SERVICE_API_HPP_

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "narrmem/pipeline/runner.hpp"
#include "narrmem/service/workspace.hpp"

namespace narrmem {

// 400 validation and malformed input, 404 unknown ids, 409 conflicts,
// 503 gateway failures, 500 otherwise.
int http_status(const std::string &error_code);

// Pipeline runs in flight and finished. At most one active run per series.
class RunRegistry {
 public:
  struct Snapshot {
    std::string run_id;
    SeriesId series;
    int season = 1;
    std::string state;  // "running", "completed", "failed"
    std::vector<nlohmann::json> events;
    nlohmann::json results = nlohmann::json::array();
    nlohmann::json error;  // null unless failed
  };

  using Job = std::function<nlohmann::json(const EventSink &emit)>;

  RunRegistry() = default;
  ~RunRegistry();
  RunRegistry(const RunRegistry &) = delete;
  RunRegistry &operator=(const RunRegistry &) = delete;

  // RUN_ACTIVE when `series` already has a running job. The job's return
  // value becomes the run's results; an exception fails the run with a
  // run_failed event.
  std::string start(const SeriesId &series, int season, Job job);
  bool active(const SeriesId &series) const;
  Snapshot snapshot(const std::string &run_id) const;  // UNKNOWN_ID

  // Waits up to `timeout` for events past `from`. Returns the new events and
  // whether the run has finished.
  std::pair<std::vector<nlohmann::json>, bool> wait_events(const std::string &run_id, size_t from,
                                                          std::chrono::milliseconds timeout) const;
  void join_all();

 private:
  struct Run {
    Snapshot snap;
    std::thread worker;
  };
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::map<std::string, std::unique_ptr<Run>> runs_;
  std::set<SeriesId> active_;
  int next_ = 1;
};

nlohmann::json to_json_status(const RunRegistry::Snapshot &s);

class ApiServer {
 public:
  explicit ApiServer(Workspace &workspace);
  ~ApiServer();
  ApiServer(const ApiServer &) = delete;
  ApiServer &operator=(const ApiServer &) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. IO_ERROR when binding fails.
  int start(const std::string &host, int port);
  // Serves on the calling thread until stop().
  void listen(const std::string &host, int port);
  void stop();

  RunRegistry &runs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace narrmem

#endif  // NARRMEM_SERVICE_API_HPP_
