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

#include "matchprobe/corpus.hpp"

namespace matchprobe {

// Synthetic venue: reviewers publish on a few topics, each topic owning a
// set of pseudo-words, and submissions mix one or two topics with a shared
// general vocabulary.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t reviewers = 200;
  std::size_t topics = 24;
  std::size_t topic_words = 40;
  std::size_t general_words = 400;
  std::size_t min_publications = 10;
  std::size_t max_publications = 14;
  std::size_t submissions = 60;
  std::size_t abstract_words = 90;
  std::size_t title_words = 8;
  // Probability that an abstract word comes from the paper's topic.
  double topic_share = 0.45;
  std::string label = "synth";
};

Corpus synth_corpus(const SynthConfig& config);

// The previous edition of the same venue: most reviewers return with their
// newest paper not yet published, a few are new, and the submissions differ.
Corpus synth_proxy_corpus(const SynthConfig& config);

}  // namespace matchprobe
