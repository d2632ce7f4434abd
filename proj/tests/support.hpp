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

#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "matchprobe/corpus.hpp"
#include "matchprobe/embedder.hpp"
#include "matchprobe/error.hpp"
#include "matchprobe/matcher.hpp"

namespace mpt {

using namespace matchprobe;

inline Corpus make_corpus(const std::vector<PaperRecord>& papers, const std::vector<ReviewerProfile>& reviewers,
                          std::set<std::string> submissions = {}, std::string label = "fixture") {
  Corpus c;
  c.label = std::move(label);
  for (const auto& p : papers) c.papers.emplace(p.id, p);
  for (const auto& r : reviewers) c.reviewers.emplace(r.id, r);
  c.submissions = std::move(submissions);
  return c;
}

// Looks vectors up by title, so fixtures can pin exact cosines.
class TableProvider final : public EmbeddingProvider {
 public:
  explicit TableProvider(std::map<std::string, std::vector<double>> table, std::size_t dim = 2)
      : table_(std::move(table)), dim_(dim) {}
  std::string tag() const override { return "table"; }
  std::size_t dimension() const override { return dim_; }
  EmbeddingVector embed(std::string_view title, std::string_view) const override {
    const auto it = table_.find(std::string(title));
    if (it == table_.end()) throw NotFoundError("no vector for " + std::string(title));
    return {it->second, "table", false};
  }

 private:
  std::map<std::string, std::vector<double>> table_;
  std::size_t dim_;
};

// Unit vector in the plane with cosine c against (1, 0).
inline std::vector<double> at_cosine(double c) { return {c, std::sqrt(1.0 - c * c)}; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("matchprobe-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mpt
