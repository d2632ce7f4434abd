// Copyright 2026 The matchprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "matchprobe/error.hpp"
#include "matchprobe/matcher.hpp"
#include "matchprobe/text_attack.hpp"

namespace matchprobe {

inline constexpr int kSchemaVersion = 1;

// An HTTP-level failure: status code plus message.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

enum class SessionStatus { active, stopped_early, closed };
std::string_view to_string(SessionStatus status);
SessionStatus parse_session_status(std::string_view s);

struct SessionDraft {
  DraftAbstract draft;
  std::string timestamp;
  int manipulated_rank = 0;
  bool check_passed = false;
  std::string keyword;  // set when the draft is an attempt at inserting one
};

struct Session {
  std::string id;
  std::string corpus_label;
  std::string paper_id;
  std::string reviewer_id;
  CurationPlan curation;
  AttackBudget budget;
  PoolingPolicy pooling;
  Archive adv_archive;
  int natural_rank = 0;
  double baseline_similarity = 0.0;
  std::vector<SessionDraft> history;  // [0] is the original abstract
  // current: the draft edits build on (last one passing the check).
  // best: highest similarity among drafts that passed.
  std::size_t current = 0;
  std::size_t best = 0;
  std::set<std::string> inserted_keywords;
  std::map<std::string, int> keyword_attempts;
  SessionStatus status = SessionStatus::active;
};

nlohmann::json to_json(const Session& session);
Session session_from_json(const nlohmann::json& j);

struct LoadedCorpus {
  std::shared_ptr<const Corpus> corpus;
  std::shared_ptr<const Matcher> matcher;
};

// Session bookkeeping independent of the HTTP transport. Every method returns
// the response body and throws ServiceError on client errors.
class SessionManager {
 public:
  // `log_path` empty disables persistence; otherwise existing sessions are
  // replayed from it before new events are appended.
  SessionManager(std::map<std::string, LoadedCorpus> corpora, std::shared_ptr<const RewriteProvider> rewriter,
                 std::string log_path = {});

  nlohmann::json health() const;
  nlohmann::json create_session(const nlohmann::json& body);
  nlohmann::json get_session(const std::string& id) const;
  nlohmann::json list_sessions() const;
  nlohmann::json submit_draft(const std::string& id, const nlohmann::json& body);
  nlohmann::json keywords(const std::string& id, int k) const;
  nlohmann::json early_stop_check(const std::string& id, const nlohmann::json& body);
  nlohmann::json close_session(const std::string& id);

  std::size_t session_count() const;
  // Lines of the log that could not be replayed.
  const std::vector<std::string>& replay_warnings() const { return replay_warnings_; }

 private:
  struct Slot {
    mutable std::mutex mu;
    Session session;
  };

  const LoadedCorpus& corpus(const std::string& label, int missing_status) const;
  std::shared_ptr<Slot> slot(const std::string& id) const;
  void append_log(const nlohmann::json& event);
  void replay();

  std::map<std::string, LoadedCorpus> corpora_;
  std::shared_ptr<const RewriteProvider> rewriter_;
  std::string log_path_;
  std::mutex log_mu_;
  std::ofstream log_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 1;
  std::vector<std::string> replay_warnings_;
};

// Routes:
//   GET  /health
//   GET  /sessions                      POST /sessions
//   GET  /sessions/{id}                 POST /sessions/{id}/drafts
//   GET  /sessions/{id}/keywords?k=K    POST /sessions/{id}/early-stop-check
//   POST /sessions/{id}/close
// With a token set, every route but /health needs "Authorization: Bearer <token>".
class HttpServer {
 public:
  HttpServer(SessionManager& manager, std::string token = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port" (MATCHPROBE_BIND syntax). Throws ContractError.
std::pair<std::string, int> parse_bind(const std::string& bind);

}  // namespace matchprobe
