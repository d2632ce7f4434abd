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

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace matchprobe {

struct PaperRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::optional<int> year;
};

struct ReviewerProfile {
  std::string id;
  std::string name;
  // Most recent first.
  std::vector<std::string> publications;
};

// The papers a reviewer is matched on. Order is significant: default archives
// keep recency order, curated archives keep the order of the source archive.
struct Archive {
  std::string reviewer_id;
  std::vector<std::string> paper_ids;
  bool degenerate = false;

  std::size_t size() const { return paper_ids.size(); }
  bool empty() const { return paper_ids.empty(); }
};

struct DropEntry {
  std::string reviewer_id;
  std::string reason;  // "ambiguous-name" | "no-publications"
};

struct Corpus {
  std::string label;
  std::map<std::string, PaperRecord> papers;
  std::map<std::string, ReviewerProfile> reviewers;
  std::set<std::string> submissions;
  std::vector<DropEntry> drop_report;
  std::vector<std::string> ingest_warnings;

  const PaperRecord& paper(const std::string& id) const;
  const ReviewerProfile& reviewer(const std::string& id) const;
  bool has_reviewer(const std::string& id) const { return reviewers.contains(id); }
};

// Line-delimited JSON ingest. Reviewers whose normalized name appears on more
// than one profile record, or who list no resolvable publication, are dropped
// and reported.
Corpus ingest_corpus(const std::string& papers_path, const std::string& reviewers_path,
                     const std::string& label);
Corpus ingest_corpus(std::istream& papers, std::istream& reviewers, const std::string& label,
                     const std::string& papers_name = "papers",
                     const std::string& reviewers_name = "reviewers");

// The min(limit, |publications|) most recent publications.
Archive default_archive(const Corpus& corpus, const std::string& reviewer_id,
                        std::size_t limit = 10);

struct ValidationIssue {
  enum class Severity { warning, error };
  std::string kind;
  std::string subject;
  std::string detail;
  Severity severity = Severity::error;
};

std::vector<ValidationIssue> validate_corpus(const Corpus& corpus);

nlohmann::json to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);
// Serialized form is canonical: identical corpora give identical bytes.
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace matchprobe
