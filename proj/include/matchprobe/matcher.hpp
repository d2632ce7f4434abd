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
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "matchprobe/corpus.hpp"
#include "matchprobe/embedder.hpp"

namespace matchprobe {

struct PoolingPolicy {
  enum class Kind { mean, max, percentile };
  Kind kind = Kind::mean;
  double percentile_q = 75.0;  // meaningful only for percentile, in (0, 100]

  static PoolingPolicy mean() { return {Kind::mean, 75.0}; }
  static PoolingPolicy max() { return {Kind::max, 75.0}; }
  static PoolingPolicy percentile(double q);
  // "mean", "max" or "pNN" (e.g. "p75").
  static PoolingPolicy parse(std::string_view s);
  std::string name() const;

  friend bool operator==(const PoolingPolicy& a, const PoolingPolicy& b) {
    return a.kind == b.kind && (a.kind != Kind::percentile || a.percentile_q == b.percentile_q);
  }
};

// Aggregates per-archive-paper cosines. Percentile is nearest-rank: the
// ceil(q/100 * n)-th smallest value. Throws DegenerateInputError when empty.
double pool(std::span<const double> cosines, const PoolingPolicy& policy);

struct SimilarityScore {
  double value = 0.0;
  std::string paper_id;
  std::string reviewer_id;
  PoolingPolicy pooling;
  bool floored = false;
};

struct RankEntry {
  std::string reviewer_id;
  double similarity = 0.0;
  int rank = 0;
};

// Entries sorted by descending similarity, then reviewer id. rank is
// 1 + |{entries with strictly greater similarity}| ("1,2,2,4").
struct CompetitionRanking {
  std::string paper_id;
  std::vector<RankEntry> entries;

  const RankEntry* find(std::string_view reviewer_id) const;
};

inline constexpr int kZeroFloorRank = 100;

// Builds a ranking from (reviewer, similarity) pairs.
CompetitionRanking competition_rank(std::string paper_id,
                                    std::vector<std::pair<std::string, double>> scores);

// Similarity values of entries ranked beyond `limit` become 0; ranks stay.
CompetitionRanking top100_zero_floor(CompetitionRanking ranking, int limit = kZeroFloorRank);

// Scores papers against archives for one corpus. Archive paper embeddings are
// memoized by paper id, so re-ranking a pool for a new abstract costs one
// embedding call.
class Matcher {
 public:
  Matcher(const Corpus& corpus, const Embedder& embedder, std::size_t archive_limit = 10);

  const Corpus& corpus() const { return corpus_; }
  const Embedder& embedder() const { return embedder_; }

  EmbeddingVector embed_paper(const PaperRecord& paper) const;
  EmbeddingVector embed_text(std::string_view title, std::string_view abstract,
                             CachePolicy policy = CachePolicy::persist) const;
  std::shared_ptr<const EmbeddingVector> archive_embedding(const std::string& paper_id) const;

  std::vector<double> archive_cosines(const EmbeddingVector& query, const Archive& archive) const;
  double similarity(const EmbeddingVector& query, const Archive& archive, const PoolingPolicy& pooling) const;
  // S(title, abstract, archive).
  double similarity(std::string_view title, std::string_view abstract, const Archive& archive,
                    const PoolingPolicy& pooling, CachePolicy policy = CachePolicy::persist) const;

  SimilarityScore pair_similarity(const PaperRecord& paper, const Archive& archive,
                                  const PoolingPolicy& pooling) const;

  CompetitionRanking rank_reviewers(const EmbeddingVector& query, const std::string& paper_id,
                                    std::span<const Archive> pool, const PoolingPolicy& pooling,
                                    bool zero_floor = false) const;
  CompetitionRanking rank_reviewers(const PaperRecord& paper, std::span<const Archive> pool,
                                    const PoolingPolicy& pooling, bool zero_floor = false) const;

  // Every reviewer with their default archive, ordered by reviewer id.
  const std::vector<Archive>& default_pool() const { return default_pool_; }
  const Archive& default_archive_of(const std::string& reviewer_id) const;

  // Rank among the full default pool, unmodified abstract.
  int natural_rank(const PaperRecord& paper, const std::string& reviewer_id, const PoolingPolicy& pooling) const;

 private:
  const Corpus& corpus_;
  const Embedder& embedder_;
  std::vector<Archive> default_pool_;
  std::unordered_map<std::string, std::size_t> pool_index_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const EmbeddingVector>> paper_vectors_;
};

}  // namespace matchprobe
