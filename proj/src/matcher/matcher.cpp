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

#include "matchprobe/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "matchprobe/error.hpp"

namespace matchprobe {

PoolingPolicy PoolingPolicy::percentile(double q) {
  if (!(q > 0.0 && q <= 100.0)) throw ContractError("percentile must lie in (0, 100]");
  return {Kind::percentile, q};
}

PoolingPolicy PoolingPolicy::parse(std::string_view s) {
  if (s == "mean" || s == "avg" || s == "average") return mean();
  if (s == "max") return max();
  if (s.size() > 1 && s[0] == 'p') {
    try {
      std::size_t used = 0;
      const std::string num(s.substr(1));
      const double q = std::stod(num, &used);
      if (used == num.size()) return percentile(q);
    } catch (const std::logic_error&) {
    }
  }
  throw ContractError("unknown pooling policy: " + std::string(s));
}

std::string PoolingPolicy::name() const {
  switch (kind) {
    case Kind::mean:
      return "mean";
    case Kind::max:
      return "max";
    case Kind::percentile: {
      std::string q = std::to_string(percentile_q);
      q.erase(q.find_last_not_of('0') + 1);
      if (q.back() == '.') q.pop_back();
      return "p" + q;
    }
  }
  return "unknown";
}

double pool(std::span<const double> cosines, const PoolingPolicy& policy) {
  if (cosines.empty()) throw DegenerateInputError("cannot pool an empty archive");
  switch (policy.kind) {
    case PoolingPolicy::Kind::mean: {
      double sum = 0.0;
      for (const double c : cosines) sum += c;
      return sum / static_cast<double>(cosines.size());
    }
    case PoolingPolicy::Kind::max:
      return *std::max_element(cosines.begin(), cosines.end());
    case PoolingPolicy::Kind::percentile: {
      std::vector<double> sorted(cosines.begin(), cosines.end());
      std::sort(sorted.begin(), sorted.end());
      const double n = static_cast<double>(sorted.size());
      auto idx = static_cast<std::size_t>(std::ceil(policy.percentile_q / 100.0 * n));
      idx = std::clamp<std::size_t>(idx, 1, sorted.size());
      return sorted[idx - 1];
    }
  }
  throw ContractError("unknown pooling kind");
}

const RankEntry* CompetitionRanking::find(std::string_view reviewer_id) const {
  for (const auto& e : entries) {
    if (e.reviewer_id == reviewer_id) return &e;
  }
  return nullptr;
}

CompetitionRanking competition_rank(std::string paper_id, std::vector<std::pair<std::string, double>> scores) {
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  CompetitionRanking out;
  out.paper_id = std::move(paper_id);
  out.entries.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    int rank = static_cast<int>(i) + 1;
    if (i > 0 && scores[i].second == scores[i - 1].second) rank = out.entries.back().rank;
    out.entries.push_back({std::move(scores[i].first), scores[i].second, rank});
  }
  return out;
}

CompetitionRanking top100_zero_floor(CompetitionRanking ranking, int limit) {
  for (auto& e : ranking.entries) {
    if (e.rank > limit) e.similarity = 0.0;
  }
  return ranking;
}

Matcher::Matcher(const Corpus& corpus, const Embedder& embedder, std::size_t archive_limit)
    : corpus_(corpus), embedder_(embedder) {
  default_pool_.reserve(corpus.reviewers.size());
  for (const auto& [id, _] : corpus.reviewers) {
    pool_index_.emplace(id, default_pool_.size());
    default_pool_.push_back(default_archive(corpus, id, archive_limit));
  }
}

EmbeddingVector Matcher::embed_paper(const PaperRecord& paper) const {
  return embedder_.embed(paper.title, paper.abstract);
}

EmbeddingVector Matcher::embed_text(std::string_view title, std::string_view abstract, CachePolicy policy) const {
  return embedder_.embed(title, abstract, policy);
}

std::shared_ptr<const EmbeddingVector> Matcher::archive_embedding(const std::string& paper_id) const {
  {
    std::shared_lock lock(mu_);
    if (auto it = paper_vectors_.find(paper_id); it != paper_vectors_.end()) return it->second;
  }
  auto v = std::make_shared<const EmbeddingVector>(embed_paper(corpus_.paper(paper_id)));
  std::unique_lock lock(mu_);
  return paper_vectors_.emplace(paper_id, std::move(v)).first->second;
}

std::vector<double> Matcher::archive_cosines(const EmbeddingVector& query, const Archive& archive) const {
  std::vector<double> out;
  out.reserve(archive.size());
  for (const auto& pid : archive.paper_ids) out.push_back(cosine(query, *archive_embedding(pid)));
  return out;
}

double Matcher::similarity(const EmbeddingVector& query, const Archive& archive, const PoolingPolicy& pooling) const {
  if (archive.empty()) {
    throw DegenerateInputError("reviewer " + archive.reviewer_id + " has an empty archive");
  }
  const auto cos = archive_cosines(query, archive);
  return pool(cos, pooling);
}

double Matcher::similarity(std::string_view title, std::string_view abstract, const Archive& archive,
                           const PoolingPolicy& pooling, CachePolicy policy) const {
  return similarity(embed_text(title, abstract, policy), archive, pooling);
}

SimilarityScore Matcher::pair_similarity(const PaperRecord& paper, const Archive& archive,
                                         const PoolingPolicy& pooling) const {
  return {similarity(embed_paper(paper), archive, pooling), paper.id, archive.reviewer_id, pooling, false};
}

CompetitionRanking Matcher::rank_reviewers(const EmbeddingVector& query, const std::string& paper_id,
                                           std::span<const Archive> pool, const PoolingPolicy& pooling,
                                           bool zero_floor) const {
  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(pool.size());
  for (const auto& archive : pool) scores.emplace_back(archive.reviewer_id, similarity(query, archive, pooling));
  auto ranking = competition_rank(paper_id, std::move(scores));
  return zero_floor ? top100_zero_floor(std::move(ranking)) : ranking;
}

CompetitionRanking Matcher::rank_reviewers(const PaperRecord& paper, std::span<const Archive> pool,
                                           const PoolingPolicy& pooling, bool zero_floor) const {
  return rank_reviewers(embed_paper(paper), paper.id, pool, pooling, zero_floor);
}

const Archive& Matcher::default_archive_of(const std::string& reviewer_id) const {
  auto it = pool_index_.find(reviewer_id);
  if (it == pool_index_.end()) throw NotFoundError("reviewer not in pool: " + reviewer_id);
  return default_pool_[it->second];
}

int Matcher::natural_rank(const PaperRecord& paper, const std::string& reviewer_id,
                          const PoolingPolicy& pooling) const {
  default_archive_of(reviewer_id);
  const auto ranking = rank_reviewers(paper, default_pool_, pooling);
  return ranking.find(reviewer_id)->rank;
}

}  // namespace matchprobe
