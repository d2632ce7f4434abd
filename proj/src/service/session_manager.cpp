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

#include <algorithm>
#include <ctime>
#include <filesystem>

#include "matchprobe/error.hpp"
#include "matchprobe/service.hpp"

namespace matchprobe {
namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json versioned(json body) {
  body["schema_version"] = kSchemaVersion;
  return body;
}

json draft_json(const SessionDraft& d) {
  return {{"index", d.draft.version_index},   {"text", d.draft.text},
          {"similarity", d.draft.similarity}, {"provenance", d.draft.provenance},
          {"timestamp", d.timestamp},         {"manipulated_rank", d.manipulated_rank},
          {"check_passed", d.check_passed},   {"keyword", d.keyword}};
}

SessionDraft draft_from_json(const json& j) {
  SessionDraft d;
  d.draft.version_index = j.at("index").get<int>();
  d.draft.text = j.at("text").get<std::string>();
  d.draft.similarity = j.at("similarity").get<double>();
  d.draft.provenance = j.value("provenance", std::vector<std::string>{});
  d.timestamp = j.value("timestamp", "");
  d.manipulated_rank = j.at("manipulated_rank").get<int>();
  d.check_passed = j.at("check_passed").get<bool>();
  d.keyword = j.value("keyword", "");
  return d;
}

json budget_used(const Session& s) {
  const auto& original = s.history.front().draft.text;
  return {{"sentences_added", text::added_sentence_count(original, s.history[s.current].draft.text)},
          {"keywords_inserted", s.inserted_keywords.size()},
          {"sentence_cap", s.budget.sentence_cap},
          {"keyword_cap", s.budget.keyword_cap}};
}

std::string require_string(const json& body, const char* key) {
  if (!body.contains(key) || !body.at(key).is_string()) {
    throw ServiceError(400, std::string("missing string field \"") + key + "\"");
  }
  return body.at(key).get<std::string>();
}

int manipulated_rank(const Matcher& m, const Session& s, const EmbeddingVector& query) {
  const auto pool = substitute_archive(m.default_pool(), s.adv_archive);
  return m.rank_reviewers(query, s.paper_id, pool, s.pooling).find(s.reviewer_id)->rank;
}

}  // namespace

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::active:
      return "active";
    case SessionStatus::stopped_early:
      return "stopped_early";
    case SessionStatus::closed:
      return "closed";
  }
  return "unknown";
}

SessionStatus parse_session_status(std::string_view s) {
  if (s == "active") return SessionStatus::active;
  if (s == "stopped_early") return SessionStatus::stopped_early;
  if (s == "closed") return SessionStatus::closed;
  throw ContractError("unknown session status: " + std::string(s));
}

json to_json(const Session& s) {
  json history = json::array();
  for (const auto& d : s.history) history.push_back(draft_json(d));
  return {{"id", s.id},
          {"corpus", s.corpus_label},
          {"paper_id", s.paper_id},
          {"reviewer_id", s.reviewer_id},
          {"curation", {{"keep_k", s.curation.keep_k}, {"seed", s.curation.seed}, {"enabled", s.curation.enabled}}},
          {"budget", to_json(s.budget)},
          {"pooling", s.pooling.name()},
          {"adv_archive", s.adv_archive.paper_ids},
          {"natural_rank", s.natural_rank},
          {"baseline_similarity", s.baseline_similarity},
          {"history", std::move(history)},
          {"current_index", s.current},
          {"best_index", s.best},
          {"best_similarity", s.history.at(s.best).draft.similarity},
          {"inserted_keywords", s.inserted_keywords},
          {"keyword_attempts", s.keyword_attempts},
          {"budget_used", budget_used(s)},
          {"status", to_string(s.status)}};
}

Session session_from_json(const json& j) {
  Session s;
  s.id = j.at("id").get<std::string>();
  s.corpus_label = j.at("corpus").get<std::string>();
  s.paper_id = j.at("paper_id").get<std::string>();
  s.reviewer_id = j.at("reviewer_id").get<std::string>();
  const auto& c = j.at("curation");
  s.curation = {s.reviewer_id, s.paper_id, c.at("keep_k").get<std::size_t>(), c.at("seed").get<std::uint64_t>(),
                c.at("enabled").get<bool>()};
  s.budget = attack_budget_from_json(j.at("budget"), AttackBudget::human_in_the_loop());
  s.pooling = PoolingPolicy::parse(j.at("pooling").get<std::string>());
  s.adv_archive = {s.reviewer_id, j.at("adv_archive").get<std::vector<std::string>>(), false};
  s.natural_rank = j.at("natural_rank").get<int>();
  s.baseline_similarity = j.at("baseline_similarity").get<double>();
  for (const auto& d : j.at("history")) s.history.push_back(draft_from_json(d));
  if (s.history.empty()) throw ContractError("session " + s.id + " has no history");
  s.current = j.at("current_index").get<std::size_t>();
  s.best = j.at("best_index").get<std::size_t>();
  if (s.current >= s.history.size() || s.best >= s.history.size()) {
    throw ContractError("session " + s.id + " points past its history");
  }
  s.inserted_keywords = j.value("inserted_keywords", std::set<std::string>{});
  s.keyword_attempts = j.value("keyword_attempts", std::map<std::string, int>{});
  s.status = parse_session_status(j.at("status").get<std::string>());
  return s;
}

SessionManager::SessionManager(std::map<std::string, LoadedCorpus> corpora,
                               std::shared_ptr<const RewriteProvider> rewriter, std::string log_path)
    : corpora_(std::move(corpora)), rewriter_(std::move(rewriter)), log_path_(std::move(log_path)) {
  if (corpora_.empty()) throw ContractError("the service needs at least one corpus");
  if (!log_path_.empty()) {
    if (std::filesystem::exists(log_path_)) replay();
    log_.open(log_path_, std::ios::app);
    if (!log_) throw Error("cannot open session log " + log_path_);
  }
}

void SessionManager::replay() {
  std::ifstream in(log_path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json ev = json::parse(line);
      const auto kind = ev.at("event").get<std::string>();
      if (kind == "create") {
        Session s = session_from_json(ev.at("session"));
        if (!corpora_.contains(s.corpus_label)) {
          replay_warnings_.push_back("line " + std::to_string(lineno) + ": corpus " + s.corpus_label +
                                     " not loaded, session " + s.id + " skipped");
          continue;
        }
        if (s.id.size() > 1 && s.id[0] == 's') {
          next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(s.id.substr(1)) + 1);
        }
        auto slot = std::make_shared<Slot>();
        slot->session = std::move(s);
        sessions_[slot->session.id] = std::move(slot);
        continue;
      }
      const auto it = sessions_.find(ev.at("id").get<std::string>());
      if (it == sessions_.end()) {
        replay_warnings_.push_back("line " + std::to_string(lineno) + ": unknown session");
        continue;
      }
      Session& s = it->second->session;
      if (kind == "draft") {
        s.history.push_back(draft_from_json(ev.at("entry")));
        s.current = ev.at("current_index").get<std::size_t>();
        s.best = ev.at("best_index").get<std::size_t>();
        s.inserted_keywords = ev.at("inserted_keywords").get<std::set<std::string>>();
        s.keyword_attempts = ev.at("keyword_attempts").get<std::map<std::string, int>>();
      } else if (kind == "status") {
        s.status = parse_session_status(ev.at("status").get<std::string>());
      } else {
        replay_warnings_.push_back("line " + std::to_string(lineno) + ": unknown event " + kind);
      }
    } catch (const std::exception& e) {
      replay_warnings_.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void SessionManager::append_log(const json& event) {
  if (log_path_.empty()) return;
  std::lock_guard lock(log_mu_);
  log_ << event.dump() << '\n';
  log_.flush();
}

const LoadedCorpus& SessionManager::corpus(const std::string& label, int missing_status) const {
  const auto it = corpora_.find(label);
  if (it == corpora_.end()) throw ServiceError(missing_status, "unknown corpus: " + label);
  return it->second;
}

std::shared_ptr<SessionManager::Slot> SessionManager::slot(const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session: " + id);
  return it->second;
}

json SessionManager::health() const {
  json labels = json::array();
  for (const auto& [label, _] : corpora_) labels.push_back(label);
  return versioned({{"status", "ok"}, {"corpora", std::move(labels)}, {"rewriter", rewriter_->tag()}});
}

std::size_t SessionManager::session_count() const {
  std::shared_lock lock(sessions_mu_);
  return sessions_.size();
}

json SessionManager::create_session(const json& body) {
  if (!body.is_object()) throw ServiceError(400, "request body must be a JSON object");
  std::string label;
  if (body.contains("corpus")) {
    label = require_string(body, "corpus");
  } else if (corpora_.size() == 1) {
    label = corpora_.begin()->first;
  } else {
    throw ServiceError(400, "missing string field \"corpus\"");
  }
  const LoadedCorpus& lc = corpus(label, 404);
  const Matcher& m = *lc.matcher;

  Session s;
  s.corpus_label = label;
  s.paper_id = require_string(body, "paper_id");
  s.reviewer_id = require_string(body, "reviewer_id");
  if (!lc.corpus->papers.contains(s.paper_id)) throw ServiceError(404, "unknown paper: " + s.paper_id);
  if (!lc.corpus->has_reviewer(s.reviewer_id)) throw ServiceError(404, "unknown reviewer: " + s.reviewer_id);

  try {
    s.budget = attack_budget_from_json(body.value("budget", json::object()), AttackBudget::human_in_the_loop());
    s.pooling = PoolingPolicy::parse(body.value("pooling", "mean"));
  } catch (const Error& e) {
    throw ServiceError(422, e.what());
  }
  if (const auto problems = s.budget.problems(true); !problems.empty()) {
    std::string msg = "invalid budget:";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw ServiceError(422, msg);
  }
  const json cur = body.value("curation", json::object());
  try {
    s.curation = {s.reviewer_id, s.paper_id, cur.value("keep_k", std::size_t{1}), cur.value("seed", std::uint64_t{0}),
                  cur.value("enabled", true)};
  } catch (const json::exception& e) {
    throw ServiceError(422, std::string("malformed curation: ") + e.what());
  }

  const PaperRecord& paper = lc.corpus->paper(s.paper_id);
  try {
    s.natural_rank = m.natural_rank(paper, s.reviewer_id, s.pooling);
    s.adv_archive = apply_curation(s.curation, m);
  } catch (const ContractError& e) {
    throw ServiceError(422, e.what());
  }
  const auto query = m.embed_paper(paper);
  s.baseline_similarity = m.similarity(query, s.adv_archive, s.pooling);
  SessionDraft original{{paper.abstract, 0, {"original"}, s.baseline_similarity}, utc_now(), 0, true, {}};
  original.manipulated_rank = manipulated_rank(m, s, query);
  s.history.push_back(std::move(original));

  auto slot = std::make_shared<Slot>();
  {
    std::unique_lock lock(sessions_mu_);
    char id[16];
    std::snprintf(id, sizeof id, "s%06llu", static_cast<unsigned long long>(next_id_++));
    s.id = id;
    slot->session = std::move(s);
    sessions_[slot->session.id] = slot;
  }
  std::lock_guard lock(slot->mu);
  json out = to_json(slot->session);
  append_log({{"event", "create"}, {"session", out}});
  json titles = json::array();
  for (const auto& pid : slot->session.adv_archive.paper_ids) {
    titles.push_back({{"id", pid}, {"title", lc.corpus->paper(pid).title}});
  }
  out["adv_archive_papers"] = std::move(titles);
  return versioned(std::move(out));
}

json SessionManager::get_session(const std::string& id) const {
  auto sl = slot(id);
  std::lock_guard lock(sl->mu);
  return versioned(to_json(sl->session));
}

json SessionManager::list_sessions() const {
  std::vector<std::shared_ptr<Slot>> slots;
  {
    std::shared_lock lock(sessions_mu_);
    for (const auto& [_, sl] : sessions_) slots.push_back(sl);
  }
  json items = json::array();
  for (const auto& sl : slots) {
    std::lock_guard lock(sl->mu);
    const Session& s = sl->session;
    items.push_back({{"id", s.id},
                     {"corpus", s.corpus_label},
                     {"paper_id", s.paper_id},
                     {"reviewer_id", s.reviewer_id},
                     {"status", to_string(s.status)},
                     {"drafts", s.history.size()}});
  }
  return versioned({{"sessions", std::move(items)}});
}

json SessionManager::submit_draft(const std::string& id, const json& body) {
  if (!body.is_object()) throw ServiceError(400, "request body must be a JSON object");
  const std::string text = require_string(body, "text");
  const std::string keyword = body.contains("keyword") ? require_string(body, "keyword") : std::string{};
  const bool constraints_ok = body.value("constraints_ok", true);

  auto sl = slot(id);
  std::lock_guard lock(sl->mu);
  Session& s = sl->session;
  if (s.status != SessionStatus::active) throw ServiceError(409, "session " + id + " is " + std::string(to_string(s.status)));
  if (!keyword.empty()) {
    if (s.keyword_attempts[keyword] >= s.budget.drafts_per_keyword) {
      throw ServiceError(409, "draft cap of " + std::to_string(s.budget.drafts_per_keyword) + " reached for keyword " +
                                  keyword);
    }
    if (!s.inserted_keywords.contains(keyword) &&
        static_cast<int>(s.inserted_keywords.size()) >= s.budget.keyword_cap) {
      throw ServiceError(409, "keyword cap of " + std::to_string(s.budget.keyword_cap) + " reached");
    }
  }
  const Matcher& m = *corpus(s.corpus_label, 500).matcher;
  const PaperRecord& paper = m.corpus().paper(s.paper_id);

  const auto query = m.embed_text(paper.title, text);
  const double sim = m.similarity(query, s.adv_archive, s.pooling);
  const double cur_sim = s.history[s.current].draft.similarity;
  // Keyword drafts are judged without slack, theme edits with the session delta.
  const double delta = keyword.empty() ? s.budget.delta : 0.0;
  const auto added = text::added_sentence_count(s.history.front().draft.text, text);
  std::string reason;
  if (!constraints_ok) {
    reason = "constraints check failed";
  } else if (static_cast<int>(added) > s.budget.sentence_cap) {
    reason = "adds " + std::to_string(added) + " sentences, cap is " + std::to_string(s.budget.sentence_cap);
  } else if (!(sim + delta > cur_sim)) {
    reason = "similarity check failed";
  }
  const bool passed = reason.empty();

  SessionDraft d;
  d.draft = {text, static_cast<int>(s.history.size()), s.history[s.current].draft.provenance, sim};
  d.draft.provenance.push_back(keyword.empty() ? "edit:" + std::to_string(s.history.size()) : "keyword:" + keyword);
  d.timestamp = utc_now();
  d.manipulated_rank = manipulated_rank(m, s, query);
  d.check_passed = passed;
  d.keyword = keyword;
  s.history.push_back(d);
  if (!keyword.empty()) ++s.keyword_attempts[keyword];
  if (passed) {
    s.current = s.history.size() - 1;
    if (sim > s.history[s.best].draft.similarity) s.best = s.current;
    if (!keyword.empty()) s.inserted_keywords.insert(keyword);
  }
  append_log({{"event", "draft"},
              {"id", s.id},
              {"entry", draft_json(d)},
              {"current_index", s.current},
              {"best_index", s.best},
              {"inserted_keywords", s.inserted_keywords},
              {"keyword_attempts", s.keyword_attempts}});

  json out = {{"session_id", s.id},
              {"index", d.draft.version_index},
              {"similarity", sim},
              {"previous_similarity", cur_sim},
              {"delta", delta},
              {"check_passed", passed},
              {"reason", reason},
              {"manipulated_rank", d.manipulated_rank},
              {"current_index", s.current},
              {"best_index", s.best},
              {"best_similarity", s.history[s.best].draft.similarity},
              {"history_length", s.history.size()},
              {"budget_used", budget_used(s)},
              {"status", to_string(s.status)}};
  if (!keyword.empty()) {
    out["keyword_attempts"] = s.keyword_attempts[keyword];
    out["keyword_attempts_left"] = s.budget.drafts_per_keyword - s.keyword_attempts[keyword];
  }
  return versioned(std::move(out));
}

json SessionManager::keywords(const std::string& id, int k) const {
  if (k < 0) throw ServiceError(422, "k must be non-negative");
  auto sl = slot(id);
  std::lock_guard lock(sl->mu);
  const Session& s = sl->session;
  if (s.status != SessionStatus::active) throw ServiceError(409, "session " + id + " is " + std::string(to_string(s.status)));
  const Matcher& m = *corpus(s.corpus_label, 500).matcher;
  const PaperRecord& paper = m.corpus().paper(s.paper_id);
  const auto& best = s.history[s.best].draft;
  const auto search = find_keywords(paper.title, best.text, s.adv_archive, k, m, s.pooling);
  json items = json::array();
  for (std::size_t i = 0; i < search.keywords.size(); ++i) {
    items.push_back({{"keyword", search.keywords[i]},
                     {"projected_similarity", search.similarities[i]},
                     {"delta", search.similarities[i] - search.base_similarity}});
  }
  return versioned({{"session_id", s.id},
                    {"draft_index", s.best},
                    {"current_similarity", search.base_similarity},
                    {"suggestions", std::move(items)},
                    {"warnings", search.warnings}});
}

json SessionManager::early_stop_check(const std::string& id, const json& body) {
  if (!body.is_object()) throw ServiceError(400, "request body must be a JSON object");
  const std::string proxy_label = require_string(body, "proxy");
  const bool request_stop = body.value("stop", false);
  const LoadedCorpus& proxy = corpus(proxy_label, 404);

  auto sl = slot(id);
  std::lock_guard lock(sl->mu);
  Session& s = sl->session;
  if (s.status != SessionStatus::active) throw ServiceError(409, "session " + id + " is " + std::string(to_string(s.status)));
  const Matcher& m = *corpus(s.corpus_label, 500).matcher;
  const PaperRecord& paper = m.corpus().paper(s.paper_id);
  const auto verdict =
      early_stopping_check(paper.title, s.history[s.best].draft.text, s.adv_archive, m, *proxy.matcher, s.pooling);
  if (verdict.stop && request_stop) {
    s.status = SessionStatus::stopped_early;
    append_log({{"event", "status"}, {"id", s.id}, {"status", to_string(s.status)}});
  }
  return versioned({{"session_id", s.id},
                    {"proxy", proxy_label},
                    {"draft_index", s.best},
                    {"stop", verdict.stop},
                    {"proxy_rank", verdict.proxy_rank},
                    {"status", to_string(s.status)}});
}

json SessionManager::close_session(const std::string& id) {
  auto sl = slot(id);
  std::lock_guard lock(sl->mu);
  Session& s = sl->session;
  if (s.status != SessionStatus::active) throw ServiceError(409, "session " + id + " is " + std::string(to_string(s.status)));
  s.status = SessionStatus::closed;
  append_log({{"event", "status"}, {"id", s.id}, {"status", to_string(s.status)}});
  return versioned(to_json(s));
}

}  // namespace matchprobe
