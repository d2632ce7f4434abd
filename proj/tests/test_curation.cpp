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

#include <gtest/gtest.h>

#include <algorithm>

#include "matchprobe/curation.hpp"
#include "matchprobe/synth.hpp"
#include "support.hpp"

using namespace matchprobe;

namespace {

struct Fixture {
  Corpus corpus;
  Embedder embedder;
  Matcher matcher;

  explicit Fixture(std::map<std::string, double> cosines)
      : corpus(build(cosines)), embedder(provider(cosines)), matcher(corpus, embedder) {}

  static Corpus build(const std::map<std::string, double>& cosines) {
    std::vector<PaperRecord> papers{{"t", "T", "", {}}};
    ReviewerProfile r{"r", "R", {}};
    for (const auto& [id, _] : cosines) {
      papers.push_back({id, id, "", {}});
      r.publications.push_back(id);
    }
    return mpt::make_corpus(papers, {r}, {"t"});
  }
  static std::shared_ptr<EmbeddingProvider> provider(const std::map<std::string, double>& cosines) {
    std::map<std::string, std::vector<double>> table{{"T", {1, 0}}};
    for (const auto& [id, c] : cosines) table[id] = mpt::at_cosine(c);
    return std::make_shared<mpt::TableProvider>(table);
  }
  Archive curate(std::size_t k, std::uint64_t seed, std::vector<std::string>* w = nullptr) {
    return curate_adversarial_archive(corpus.paper("t"), matcher.default_archive_of("r"), k, seed, matcher, w);
  }
};

}  // namespace

TEST(Curation, KeepsTopCosines) {
  Fixture f({{"q1", 0.3}, {"q2", 0.7}, {"q3", 0.5}});
  EXPECT_EQ(f.curate(1, 0).paper_ids, (std::vector<std::string>{"q2"}));
  EXPECT_EQ(f.curate(2, 0).paper_ids, (std::vector<std::string>{"q2", "q3"}));
}

TEST(Curation, OversizedKeepIsIdentityWithWarning) {
  Fixture f({{"q1", 0.3}, {"q2", 0.7}, {"q3", 0.5}});
  std::vector<std::string> w;
  EXPECT_EQ(f.curate(3, 0).paper_ids, f.matcher.default_archive_of("r").paper_ids);
  EXPECT_EQ(f.curate(7, 0, &w).paper_ids, f.matcher.default_archive_of("r").paper_ids);
  EXPECT_EQ(w.size(), 1u);
  EXPECT_THROW(f.curate(0, 0), ContractError);
}

TEST(Curation, TiesBreakUniformly) {
  Fixture f({{"q1", 0.8}, {"q2", 0.8}, {"q3", 0.2}});
  EXPECT_EQ(f.curate(1, 1234).paper_ids, f.curate(1, 1234).paper_ids);
  int q1 = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) {
    const auto a = f.curate(1, static_cast<std::uint64_t>(s));
    ASSERT_EQ(a.size(), 1u);
    ASSERT_NE(a.paper_ids[0], "q3");
    q1 += a.paper_ids[0] == "q1";
  }
  EXPECT_NEAR(static_cast<double>(q1) / trials, 0.5, 0.02);
}

TEST(Curation, MaxPoolingUnchangedBySingletonCuration) {
  SynthConfig sc;
  sc.reviewers = 30;
  sc.submissions = 5;
  const Corpus c = synth_corpus(sc);
  Embedder e(std::make_shared<ReferenceEmbedder>(128));
  Matcher m(c, e);
  for (const auto& pid : c.submissions) {
    const auto& p = c.paper(pid);
    for (const auto& a : m.default_pool()) {
      const auto curated = curate_adversarial_archive(p, a, 1, 3, m);
      EXPECT_EQ(m.similarity(m.embed_paper(p), curated, PoolingPolicy::max()),
                m.similarity(m.embed_paper(p), a, PoolingPolicy::max()));
      EXPECT_GE(m.similarity(m.embed_paper(p), curated, PoolingPolicy::mean()),
                m.similarity(m.embed_paper(p), a, PoolingPolicy::mean()));
    }
  }
}

TEST(Curation, CurationOnlyRankMatchesFullReRank) {
  SynthConfig sc;
  sc.reviewers = 100;
  sc.submissions = 4;
  const Corpus c = synth_corpus(sc);
  Embedder e(std::make_shared<ReferenceEmbedder>(256));
  Matcher m(c, e);
  const auto pm = PoolingPolicy::mean();
  for (const auto& pid : c.submissions) {
    const auto& p = c.paper(pid);
    const auto q = m.embed_paper(p);
    for (const auto* rid : {"r0003", "r0042", "r0099"}) {
      const int got = curation_only_ranking(p, rid, m, pm, 1, 9);
      // Oracle: score everyone from scratch with the curated archive swapped in.
      const auto curated = curate_adversarial_archive(p, m.default_archive_of(rid), 1, 9, m);
      const double mine = m.similarity(q, curated, pm);
      int expected = 1;
      for (const auto& a : m.default_pool()) {
        if (a.reviewer_id != rid && m.similarity(q, a, pm) > mine) ++expected;
      }
      EXPECT_EQ(got, expected);
      EXPECT_LE(got, m.natural_rank(p, rid, pm));
    }
  }
}

TEST(Curation, SubsetAndBoundaryProperties) {
  SynthConfig sc;
  sc.reviewers = 20;
  sc.submissions = 3;
  const Corpus c = synth_corpus(sc);
  Embedder e(std::make_shared<ReferenceEmbedder>(64));
  Matcher m(c, e);
  for (const auto& pid : c.submissions) {
    const auto q = m.embed_paper(c.paper(pid));
    for (const auto& a : m.default_pool()) {
      for (const std::size_t k : {1u, 2u, 5u}) {
        const auto cur = curate_adversarial_archive(q, a, k, 1, m);
        ASSERT_EQ(cur.size(), std::min(k, a.size()));
        const auto all = m.archive_cosines(q, a);
        double kept_min = 2.0, dropped_max = -2.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          const bool kept = std::find(cur.paper_ids.begin(), cur.paper_ids.end(), a.paper_ids[i]) != cur.paper_ids.end();
          if (kept) {
            kept_min = std::min(kept_min, all[i]);
          } else {
            dropped_max = std::max(dropped_max, all[i]);
          }
        }
        EXPECT_GE(kept_min, dropped_max);
      }
    }
  }
}
