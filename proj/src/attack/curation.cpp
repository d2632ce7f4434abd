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

#include "matchprobe/curation.hpp"

#include <algorithm>
#include <numeric>

#include "matchprobe/error.hpp"
#include "matchprobe/rng.hpp"

namespace matchprobe {

Archive curate_adversarial_archive(const EmbeddingVector& target, const Archive& archive, std::size_t keep_k,
                                   std::uint64_t seed, const Matcher& matcher, std::vector<std::string>* warnings) {
  if (archive.empty()) throw DegenerateInputError("cannot curate the empty archive of " + archive.reviewer_id);
  if (keep_k == 0) throw ContractError("keep_k must be at least 1");
  if (keep_k > archive.size()) {
    if (warnings) {
      warnings->push_back("keep_k " + std::to_string(keep_k) + " exceeds archive size " +
                          std::to_string(archive.size()) + " for reviewer " + archive.reviewer_id +
                          "; keeping the whole archive");
    }
    return archive;
  }

  const auto cos = matcher.archive_cosines(target, archive);
  std::vector<std::size_t> order(archive.size());
  std::iota(order.begin(), order.end(), 0);
  // A uniform permutation followed by a stable sort leaves every group of
  // exactly tied papers in uniformly random order.
  SplitMix64 rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cos[a] > cos[b]; });
  order.resize(keep_k);
  std::sort(order.begin(), order.end());

  Archive out;
  out.reviewer_id = archive.reviewer_id;
  for (const std::size_t i : order) out.paper_ids.push_back(archive.paper_ids[i]);
  return out;
}

Archive curate_adversarial_archive(const PaperRecord& target, const Archive& archive, std::size_t keep_k,
                                   std::uint64_t seed, const Matcher& matcher, std::vector<std::string>* warnings) {
  return curate_adversarial_archive(matcher.embed_paper(target), archive, keep_k, seed, matcher, warnings);
}

Archive apply_curation(const CurationPlan& plan, const Matcher& matcher, std::vector<std::string>* warnings) {
  const Archive& base = matcher.default_archive_of(plan.reviewer_id);
  if (!plan.enabled) return base;
  return curate_adversarial_archive(matcher.corpus().paper(plan.target_paper_id), base, plan.keep_k, plan.seed,
                                    matcher, warnings);
}

std::vector<Archive> substitute_archive(const std::vector<Archive>& pool, const Archive& replacement) {
  std::vector<Archive> out = pool;
  for (auto& a : out) {
    if (a.reviewer_id == replacement.reviewer_id) a = replacement;
  }
  return out;
}

int curation_only_ranking(const PaperRecord& paper, const std::string& reviewer_id, const Matcher& matcher,
                          const PoolingPolicy& pooling, std::size_t keep_k, std::uint64_t seed) {
  const CurationPlan plan{reviewer_id, paper.id, keep_k, seed, true};
  const Archive curated = apply_curation(plan, matcher);
  const auto pool = substitute_archive(matcher.default_pool(), curated);
  return matcher.rank_reviewers(paper, pool, pooling).find(reviewer_id)->rank;
}

}  // namespace matchprobe
