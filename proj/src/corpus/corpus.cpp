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

#include "matchprobe/corpus.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "matchprobe/error.hpp"
#include "matchprobe/text.hpp"

namespace matchprobe {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& file, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(file, line, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& file,
                           std::size_t line) {
  const json& v = require(obj, key, file, line);
  if (!v.is_string()) throw ParseError(file, line, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

template <typename Fn>
void for_each_record(std::istream& in, const std::string& file, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(file, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(file, lineno, "record must be a JSON object");
    fn(obj, lineno);
  }
}

PaperRecord parse_paper(const json& obj, const std::string& file, std::size_t line) {
  PaperRecord p;
  p.id = require_string(obj, "id", file, line);
  p.title = require_string(obj, "title", file, line);
  p.abstract = require_string(obj, "abstract", file, line);
  if (p.id.empty()) throw ParseError(file, line, "empty paper id");
  if (text::trim(p.title).empty()) throw ParseError(file, line, "empty title for paper " + p.id);
  if (auto it = obj.find("year"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ParseError(file, line, "field \"year\" must be an integer");
    p.year = it->get<int>();
  }
  return p;
}

}  // namespace

const PaperRecord& Corpus::paper(const std::string& id) const {
  auto it = papers.find(id);
  if (it == papers.end()) throw NotFoundError("unknown paper id: " + id);
  return it->second;
}

const ReviewerProfile& Corpus::reviewer(const std::string& id) const {
  auto it = reviewers.find(id);
  if (it == reviewers.end()) throw NotFoundError("unknown reviewer id: " + id);
  return it->second;
}

Corpus ingest_corpus(std::istream& papers, std::istream& reviewers, const std::string& label,
                     const std::string& papers_name, const std::string& reviewers_name) {
  Corpus corpus;
  corpus.label = label;

  std::vector<std::string> flagged_submissions;
  bool any_flag = false;
  for_each_record(papers, papers_name, [&](const json& obj, std::size_t line) {
    PaperRecord p = parse_paper(obj, papers_name, line);
    if (auto it = obj.find("submission"); it != obj.end() && !it->is_null()) {
      if (!it->is_boolean()) throw ParseError(papers_name, line, "field \"submission\" must be a boolean");
      any_flag = true;
      if (it->get<bool>()) flagged_submissions.push_back(p.id);
    }
    const std::string id = p.id;
    if (!corpus.papers.emplace(id, std::move(p)).second) {
      throw IngestError("duplicate paper id: " + id);
    }
  });

  std::vector<ReviewerProfile> profiles;
  std::unordered_set<std::string> seen_ids;
  for_each_record(reviewers, reviewers_name, [&](const json& obj, std::size_t line) {
    ReviewerProfile r;
    r.id = require_string(obj, "id", reviewers_name, line);
    r.name = require_string(obj, "name", reviewers_name, line);
    const json& pubs = require(obj, "publications", reviewers_name, line);
    if (!pubs.is_array()) throw ParseError(reviewers_name, line, "field \"publications\" must be an array");
    std::unordered_set<std::string> dedup;
    for (const auto& v : pubs) {
      if (!v.is_string()) throw ParseError(reviewers_name, line, "publication ids must be strings");
      std::string pid = v.get<std::string>();
      if (!dedup.insert(pid).second) {
        corpus.ingest_warnings.push_back("reviewer " + r.id + ": duplicate publication " + pid + " removed");
        continue;
      }
      if (!corpus.papers.contains(pid)) {
        corpus.ingest_warnings.push_back("reviewer " + r.id + ": unknown publication " + pid + " removed");
        continue;
      }
      r.publications.push_back(std::move(pid));
    }
    if (!seen_ids.insert(r.id).second) throw IngestError("duplicate reviewer id: " + r.id);
    profiles.push_back(std::move(r));
  });

  std::unordered_map<std::string, int> name_counts;
  std::unordered_set<std::string> authored;
  for (const auto& r : profiles) {
    ++name_counts[text::name_key(r.name)];
    authored.insert(r.publications.begin(), r.publications.end());
  }

  for (auto& r : profiles) {
    if (name_counts[text::name_key(r.name)] > 1) {
      corpus.drop_report.push_back({r.id, "ambiguous-name"});
    } else if (r.publications.empty()) {
      corpus.drop_report.push_back({r.id, "no-publications"});
    } else {
      const std::string id = r.id;
      corpus.reviewers.emplace(id, std::move(r));
    }
  }

  if (any_flag) {
    corpus.submissions.insert(flagged_submissions.begin(), flagged_submissions.end());
  } else {
    for (const auto& [id, _] : corpus.papers) {
      if (!authored.contains(id)) corpus.submissions.insert(id);
    }
  }
  return corpus;
}

Corpus ingest_corpus(const std::string& papers_path, const std::string& reviewers_path,
                     const std::string& label) {
  std::ifstream papers(papers_path);
  if (!papers) throw IngestError("cannot open papers file: " + papers_path);
  std::ifstream reviewers(reviewers_path);
  if (!reviewers) throw IngestError("cannot open reviewers file: " + reviewers_path);
  return ingest_corpus(papers, reviewers, label, papers_path, reviewers_path);
}

Archive default_archive(const Corpus& corpus, const std::string& reviewer_id, std::size_t limit) {
  const ReviewerProfile& r = corpus.reviewer(reviewer_id);
  Archive a;
  a.reviewer_id = reviewer_id;
  const std::size_t n = std::min(limit, r.publications.size());
  a.paper_ids.assign(r.publications.begin(), r.publications.begin() + static_cast<std::ptrdiff_t>(n));
  a.degenerate = a.paper_ids.empty();
  return a;
}

std::vector<ValidationIssue> validate_corpus(const Corpus& corpus) {
  using Sev = ValidationIssue::Severity;
  std::vector<ValidationIssue> issues;
  for (const auto& [id, p] : corpus.papers) {
    if (p.id != id) issues.push_back({"id-mismatch", id, "record id " + p.id, Sev::error});
    if (text::trim(p.title).empty()) issues.push_back({"empty-title", id, "", Sev::error});
    if (text::trim(p.abstract).empty()) issues.push_back({"empty-abstract", id, "", Sev::warning});
  }
  for (const auto& [id, r] : corpus.reviewers) {
    std::unordered_set<std::string> seen;
    for (const auto& pid : r.publications) {
      if (!corpus.papers.contains(pid)) {
        issues.push_back({"dangling-publication", id, pid, Sev::error});
      }
      if (!seen.insert(pid).second) issues.push_back({"duplicate-publication", id, pid, Sev::error});
    }
    if (r.publications.empty()) issues.push_back({"no-publications", id, "", Sev::error});
  }
  for (const auto& sid : corpus.submissions) {
    if (!corpus.papers.contains(sid)) issues.push_back({"dangling-submission", sid, "", Sev::error});
  }
  return issues;
}

nlohmann::json to_json(const Corpus& corpus) {
  json papers = json::array();
  for (const auto& [id, p] : corpus.papers) {
    json o = {{"id", p.id}, {"title", p.title}, {"abstract", p.abstract}};
    if (p.year) o["year"] = *p.year;
    papers.push_back(std::move(o));
  }
  json reviewers = json::array();
  for (const auto& [id, r] : corpus.reviewers) {
    reviewers.push_back({{"id", r.id}, {"name", r.name}, {"publications", r.publications}});
  }
  json drops = json::array();
  for (const auto& d : corpus.drop_report) drops.push_back({{"reviewer_id", d.reviewer_id}, {"reason", d.reason}});
  return {{"format", "matchprobe-corpus/1"},
          {"label", corpus.label},
          {"papers", std::move(papers)},
          {"reviewers", std::move(reviewers)},
          {"submissions", json(std::vector<std::string>(corpus.submissions.begin(), corpus.submissions.end()))},
          {"drop_report", std::move(drops)},
          {"ingest_warnings", corpus.ingest_warnings}};
}

Corpus corpus_from_json(const nlohmann::json& j) {
  try {
    Corpus c;
    c.label = j.at("label").get<std::string>();
    for (const auto& o : j.at("papers")) {
      PaperRecord p;
      p.id = o.at("id").get<std::string>();
      p.title = o.at("title").get<std::string>();
      p.abstract = o.at("abstract").get<std::string>();
      if (auto it = o.find("year"); it != o.end() && !it->is_null()) p.year = it->get<int>();
      const std::string id = p.id;
      c.papers.emplace(id, std::move(p));
    }
    for (const auto& o : j.at("reviewers")) {
      ReviewerProfile r;
      r.id = o.at("id").get<std::string>();
      r.name = o.at("name").get<std::string>();
      r.publications = o.at("publications").get<std::vector<std::string>>();
      const std::string id = r.id;
      c.reviewers.emplace(id, std::move(r));
    }
    for (const auto& s : j.at("submissions")) c.submissions.insert(s.get<std::string>());
    if (auto it = j.find("drop_report"); it != j.end()) {
      for (const auto& d : *it) c.drop_report.push_back({d.at("reviewer_id").get<std::string>(), d.at("reason").get<std::string>()});
    }
    if (auto it = j.find("ingest_warnings"); it != j.end()) c.ingest_warnings = it->get<std::vector<std::string>>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("malformed corpus document: ") + e.what());
  }
}

std::string serialize_corpus(const Corpus& corpus) { return to_json(corpus).dump(1) + "\n"; }

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write corpus file: " + path);
  out << serialize_corpus(corpus);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open corpus file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError("corpus file " + path + " is not valid JSON: " + e.what());
  }
  return corpus_from_json(j);
}

}  // namespace matchprobe
