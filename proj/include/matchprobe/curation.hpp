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
#include <cstdint>
#include <string>
#include <vector>

#include "matchprobe/corpus.hpp"
#include "matchprobe/embedder.hpp"
#include "matchprobe/matcher.hpp"

namespace matchprobe {

struct CurationPlan {
  std::string reviewer_id;
  std::string target_paper_id;
  std::size_t keep_k = 1;
  std::uint64_t seed = 0;
  // false leaves the archive untouched (the pooling comparison runs that way).
  bool enabled = true;
};

// The keep_k archive papers most similar to `target`, exact ties broken
// uniformly at random from `seed`. The result keeps the source archive's
// order, so keep_k >= |archive| is the identity. Throws DegenerateInputError
// on an empty archive.
Archive curate_adversarial_archive(const EmbeddingVector& target, const Archive& archive, std::size_t keep_k,
                                   std::uint64_t seed, const Matcher& matcher,
                                   std::vector<std::string>* warnings = nullptr);
Archive curate_adversarial_archive(const PaperRecord& target, const Archive& archive, std::size_t keep_k,
                                   std::uint64_t seed, const Matcher& matcher,
                                   std::vector<std::string>* warnings = nullptr);

// Applies a plan to the reviewer's default archive.
Archive apply_curation(const CurationPlan& plan, const Matcher& matcher, std::vector<std::string>* warnings = nullptr);

// Default pool with one reviewer's archive swapped out.
std::vector<Archive> substitute_archive(const std::vector<Archive>& pool, const Archive& replacement);

// Manipulated rank when only the colluding reviewer curates; everyone else
// keeps a default archive and the abstract is unmodified.
int curation_only_ranking(const PaperRecord& paper, const std::string& reviewer_id, const Matcher& matcher,
                          const PoolingPolicy& pooling, std::size_t keep_k = 1, std::uint64_t seed = 0);

}  // namespace matchprobe
