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

#include "matchprobe/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <vector>

#include "matchprobe/error.hpp"
#include "matchprobe/rng.hpp"
#include "matchprobe/text.hpp"

namespace matchprobe {
namespace {

constexpr std::uint64_t kProxyStream = 0x70726f7879ULL;

const char* const kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "gr", "st", "tr", "pl", "kr"};
const char* const kVowels[] = {"a", "e", "i", "o", "u", "ai", "eo"};
const char* const kCodas[] = {"", "n", "r", "s", "l", "x", "m"};

struct Vocabulary {
  std::vector<std::vector<std::string>> topics;
  std::vector<std::string> general;
};

template <typename T, std::size_t N>
const T& pick(const T (&items)[N], SplitMix64& rng) {
  return items[rng.below(N)];
}

std::string pseudo_word(SplitMix64& rng) {
  std::string w;
  const auto syllables = 2 + rng.below(2);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += pick(kOnsets, rng);
    w += pick(kVowels, rng);
  }
  w += pick(kCodas, rng);
  return w;
}

Vocabulary make_vocabulary(const SynthConfig& c, SplitMix64& rng) {
  std::set<std::string> used;
  const auto fresh = [&] {
    for (;;) {
      std::string w = pseudo_word(rng);
      if (w.size() >= 4 && used.insert(w).second) return w;
    }
  };
  Vocabulary v;
  v.topics.resize(c.topics);
  for (auto& t : v.topics) {
    for (std::size_t i = 0; i < c.topic_words; ++i) t.push_back(fresh());
  }
  for (std::size_t i = 0; i < c.general_words; ++i) v.general.push_back(fresh());
  return v;
}

// Zipf-like index: small indices are drawn more often.
std::size_t skewed(SplitMix64& rng, std::size_t n) {
  const double u = (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;
  return std::min(n - 1, static_cast<std::size_t>(std::floor(std::pow(u, 2.0) * static_cast<double>(n))));
}

std::string word(const Vocabulary& v, const std::vector<std::size_t>& topics, double topic_share, SplitMix64& rng) {
  const double u = (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;
  if (u < topic_share) {
    const auto& t = v.topics[topics[rng.below(topics.size())]];
    return t[rng.below(t.size())];
  }
  return v.general[skewed(rng, v.general.size())];
}

PaperRecord make_paper(const SynthConfig& c, const Vocabulary& v, std::string id, const std::vector<std::size_t>& topics,
                       int year, SplitMix64& rng) {
  PaperRecord p;
  p.id = std::move(id);
  p.year = year;
  for (std::size_t i = 0; i < c.title_words; ++i) {
    if (i) p.title += ' ';
    p.title += word(v, topics, std::min(1.0, c.topic_share + 0.25), rng);
  }
  p.title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(p.title[0])));
  std::size_t written = 0;
  while (written < c.abstract_words) {
    const std::size_t len = 10 + rng.below(9);
    std::string sentence;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) sentence += ' ';
      sentence += word(v, topics, c.topic_share, rng);
    }
    sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
    if (!p.abstract.empty()) p.abstract += ' ';
    p.abstract += sentence + '.';
    written += len;
  }
  return p;
}

std::string numbered(const char* prefix, std::size_t i, int width) {
  std::string n = std::to_string(i);
  if (static_cast<int>(n.size()) < width) n.insert(0, static_cast<std::size_t>(width) - n.size(), '0');
  return prefix + n;
}

struct ReviewerPlan {
  std::string id;
  std::vector<std::size_t> topics;  // primary first
};

std::vector<std::size_t> paper_topics(const std::vector<std::size_t>& reviewer_topics, std::size_t n_topics,
                                      SplitMix64& rng) {
  const auto roll = rng.below(10);
  if (roll < 6) return {reviewer_topics[0]};
  if (roll < 9) return {reviewer_topics[1 + rng.below(reviewer_topics.size() - 1)]};
  return {static_cast<std::size_t>(rng.below(n_topics))};
}

void check(const SynthConfig& c) {
  if (c.topics < 3 || c.topic_words == 0 || c.general_words == 0 || c.reviewers == 0 ||
      c.min_publications == 0 || c.max_publications < c.min_publications || c.abstract_words == 0 ||
      c.title_words == 0 || !(c.topic_share >= 0.0 && c.topic_share <= 1.0)) {
    throw ContractError("invalid synthetic corpus configuration");
  }
}

struct Venue {
  Vocabulary vocab;
  std::vector<ReviewerPlan> plans;
  Corpus corpus;  // reviewer archives, no submissions yet
};

Venue build_venue(const SynthConfig& c) {
  check(c);
  SplitMix64 rng(c.seed);
  Venue venue;
  venue.vocab = make_vocabulary(c, rng);
  venue.corpus.label = c.label;
  std::size_t next_paper = 0;
  for (std::size_t r = 0; r < c.reviewers; ++r) {
    ReviewerPlan plan{numbered("r", r, 4), {}};
    plan.topics.push_back(static_cast<std::size_t>(rng.below(c.topics)));
    while (plan.topics.size() < 3) {
      const auto t = static_cast<std::size_t>(rng.below(c.topics));
      if (std::find(plan.topics.begin(), plan.topics.end(), t) == plan.topics.end()) plan.topics.push_back(t);
    }
    ReviewerProfile profile{plan.id, "Synthetic Reviewer " + plan.id, {}};
    const auto pubs = c.min_publications + rng.below(c.max_publications - c.min_publications + 1);
    for (std::size_t i = 0; i < pubs; ++i) {
      // Most recent first.
      const int year = 2022 - static_cast<int>(i / 2);
      auto paper = make_paper(c, venue.vocab, numbered("a", next_paper++, 5),
                              paper_topics(plan.topics, c.topics, rng), year, rng);
      profile.publications.push_back(paper.id);
      venue.corpus.papers.emplace(paper.id, std::move(paper));
    }
    venue.corpus.reviewers.emplace(plan.id, std::move(profile));
    venue.plans.push_back(std::move(plan));
  }
  return venue;
}

void add_submissions(const SynthConfig& c, const Vocabulary& v, Corpus& corpus, const char* prefix, int year,
                     SplitMix64& rng) {
  for (std::size_t s = 0; s < c.submissions; ++s) {
    std::vector<std::size_t> topics{static_cast<std::size_t>(rng.below(c.topics))};
    if (rng.below(2) == 0) topics.push_back(static_cast<std::size_t>(rng.below(c.topics)));
    auto paper = make_paper(c, v, numbered(prefix, s, 4), topics, year, rng);
    corpus.submissions.insert(paper.id);
    corpus.papers.emplace(paper.id, std::move(paper));
  }
}

}  // namespace

Corpus synth_corpus(const SynthConfig& config) {
  Venue venue = build_venue(config);
  SplitMix64 rng(config.seed ^ 0x7375626dULL);
  add_submissions(config, venue.vocab, venue.corpus, "s", 2023, rng);
  return std::move(venue.corpus);
}

Corpus synth_proxy_corpus(const SynthConfig& config) {
  Venue venue = build_venue(config);
  SplitMix64 rng(config.seed ^ kProxyStream);
  Corpus proxy;
  proxy.label = config.label + "-proxy";
  for (const auto& [id, profile] : venue.corpus.reviewers) {
    if (rng.below(100) < 15 || profile.publications.size() < 2) continue;
    ReviewerProfile back = profile;
    back.publications.erase(back.publications.begin());
    for (const auto& pid : back.publications) proxy.papers.emplace(pid, venue.corpus.paper(pid));
    proxy.reviewers.emplace(id, std::move(back));
  }
  // Newcomers in the earlier edition who did not return.
  std::size_t next_paper = 0;
  const std::size_t newcomers = config.reviewers * 15 / 100;
  for (std::size_t r = 0; r < newcomers; ++r) {
    std::vector<std::size_t> topics{static_cast<std::size_t>(rng.below(config.topics)),
                                    static_cast<std::size_t>(rng.below(config.topics))};
    ReviewerProfile profile{numbered("q", r, 4), "Synthetic Reviewer " + numbered("q", r, 4), {}};
    const auto pubs = config.min_publications + rng.below(config.max_publications - config.min_publications + 1);
    for (std::size_t i = 0; i < pubs; ++i) {
      auto paper = make_paper(config, venue.vocab, numbered("b", next_paper++, 5),
                              paper_topics(topics, config.topics, rng), 2021 - static_cast<int>(i / 2), rng);
      profile.publications.push_back(paper.id);
      proxy.papers.emplace(paper.id, std::move(paper));
    }
    proxy.reviewers.emplace(profile.id, std::move(profile));
  }
  add_submissions(config, venue.vocab, proxy, "t", 2022, rng);
  return proxy;
}

}  // namespace matchprobe
