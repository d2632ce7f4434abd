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

#include <limits>

#include "matchprobe/curation.hpp"
#include "matchprobe/synth.hpp"
#include "matchprobe/text_attack.hpp"
#include "support.hpp"

using namespace matchprobe;

namespace {

struct World {
  Corpus corpus;
  Embedder embedder{std::make_shared<ReferenceEmbedder>(256)};
  std::unique_ptr<Matcher> matcher;
  StubRewriter stub;

  explicit World(std::size_t reviewers = 40) {
    SynthConfig sc;
    sc.reviewers = reviewers;
    sc.submissions = 6;
    corpus = synth_corpus(sc);
    matcher = std::make_unique<Matcher>(corpus, embedder);
  }
  const PaperRecord& paper() const { return corpus.paper(*corpus.submissions.begin()); }
  AttackContext ctx(const AttackBudget& b, const RewriteProvider* rw = nullptr) const {
    return {*matcher, rw ? *rw : stub, PoolingPolicy::mean(), b, {}, nullptr, nullptr};
  }
};

class FailingRewriter final : public RewriteProvider {
 public:
  std::string tag() const override { return "failing"; }
  RewriteResponse rewrite(const RewriteRequest&) const override { throw TransportError("rewrite service down"); }
};

class VerboseRewriter final : public RewriteProvider {
 public:
  std::string tag() const override { return "verbose"; }
  RewriteResponse rewrite(const RewriteRequest& r) const override {
    return {"First extra sentence. Second extra sentence. " + r.abstract, {}};
  }
};

// Brute-force replay of the greedy keyword search.
std::vector<std::string> replay_greedy(const Matcher& m, const std::string& title, const std::string& draft,
                                       const Archive& adv, int K) {
  std::vector<std::string> vocab;
  const text::WordFilter f;
  for (const auto& pid : adv.paper_ids) {
    for (const auto* field : {&m.corpus().paper(pid).title, &m.corpus().paper(pid).abstract}) {
      for (const auto& t : text::tokenize(*field)) {
        if (f.accepts(t) && std::find(vocab.begin(), vocab.end(), t) == vocab.end()) vocab.push_back(t);
      }
    }
  }
  std::vector<std::string> chosen;
  double current = m.similarity(title, draft, adv, PoolingPolicy::mean());
  std::string text = draft;
  for (int i = 0; i < K; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    std::string pick;
    for (const auto& w : vocab) {
      const double s = m.similarity(title, text + " " + w, adv, PoolingPolicy::mean());
      if (s > best) {
        best = s;
        pick = w;
      }
    }
    if (vocab.empty() || best < current) break;
    chosen.push_back(pick);
    current = best;
    text += " " + pick;
  }
  return chosen;
}

}  // namespace

TEST(Budget, ParseDefaultsAndProblems) {
  const auto b = AttackBudget::parse("N=3, M=1,K=4,delta=0.02");
  EXPECT_EQ(b.N, 3);
  EXPECT_EQ(b.M, 1);
  EXPECT_EQ(b.K, 4);
  EXPECT_DOUBLE_EQ(b.delta, 0.02);
  EXPECT_EQ(b.to_string(), "N=3,M=1,K=4");
  EXPECT_THROW(AttackBudget::parse("N=x"), BudgetError);
  EXPECT_THROW(AttackBudget::parse("Q=1"), BudgetError);
  EXPECT_TRUE(AttackBudget::automatic().problems(true).empty());
  EXPECT_EQ(AttackBudget::parse("M=3,K=5").problems(true).size(), 1u);
  EXPECT_TRUE(AttackBudget::parse("M=3,K=5").problems(false).empty());
  const auto h = AttackBudget::human_in_the_loop();
  EXPECT_EQ(h.N, 10);
  EXPECT_EQ(h.sentence_cap, 3);
  EXPECT_TRUE(h.problems(true).empty());
  auto bad = AttackBudget::automatic();
  bad.sentence_cap = 3;
  EXPECT_FALSE(bad.problems().empty());
  EXPECT_EQ(attack_budget_from_json(to_json(h)).N, 10);
}

TEST(SimilarityCheck, IsStrict) {
  World w;
  const auto& p = w.paper();
  const auto adv = w.matcher->default_archive_of("r0001");
  EXPECT_FALSE(similarity_check(p.title, p.abstract, p.abstract, adv, 0.0, *w.matcher, PoolingPolicy::mean()));
  EXPECT_TRUE(similarity_check(p.title, p.abstract, p.abstract, adv, 0.01, *w.matcher, PoolingPolicy::mean()));
}

TEST(FindKeywords, MatchesGreedyReplay) {
  World w;
  int checked = 0;
  for (const auto& pid : w.corpus.submissions) {
    const auto& p = w.corpus.paper(pid);
    for (const auto* rid : {"r0002", "r0017"}) {
      const auto adv = curate_adversarial_archive(p, w.matcher->default_archive_of(rid), 2, 0, *w.matcher);
      for (const int K : {0, 1, 5}) {
        const auto got = find_keywords(p.title, p.abstract, adv, K, *w.matcher, PoolingPolicy::mean());
        EXPECT_EQ(got.keywords, replay_greedy(*w.matcher, p.title, p.abstract, adv, K));
        ASSERT_EQ(got.similarities.size(), got.keywords.size());
        double prev = got.base_similarity;
        for (const double s : got.similarities) {
          EXPECT_GE(s, prev);
          prev = s;
        }
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 36);
}

TEST(FindKeywords, StopsWhenNothingHelps) {
  // Archive paper shares no tokens with anything the draft could gain.
  const auto c = mpt::make_corpus({{"t", "Alpha", "alpha alpha", {}}, {"a", "Beta", "beta", {}}},
                                  {{"r", "R", {"a"}}}, {"t"});
  Embedder e(std::make_shared<ReferenceEmbedder>(4096));
  Matcher m(c, e);
  const Archive adv = m.default_archive_of("r");
  const auto res = find_keywords("Alpha", "alpha alpha", adv, 5, m, PoolingPolicy::mean());
  // "beta" raises similarity each time it is appended again.
  EXPECT_EQ(res.keywords, (std::vector<std::string>(5, "beta")));

  const auto c2 = mpt::make_corpus({{"t", "Alpha", "x", {}}, {"a", "Of", "to in", {}}}, {{"r", "R", {"a"}}}, {"t"});
  Matcher m2(c2, e);
  const auto empty = find_keywords("Alpha", "x", m2.default_archive_of("r"), 5, m2, PoolingPolicy::mean());
  EXPECT_TRUE(empty.keywords.empty());
  EXPECT_EQ(empty.warnings.size(), 1u);
}

TEST(IncludeThemes, KeepsBestVersionAndHonorsSentenceCap) {
  World w;
  const auto& p = w.paper();
  const auto adv = curate_adversarial_archive(p, w.matcher->default_archive_of("r0005"), 1, 0, *w.matcher);
  const auto res = include_themes(p.title, p.abstract, adv, w.ctx(AttackBudget::automatic()));
  EXPECT_EQ(res.versions.size(), 6u);
  EXPECT_GE(res.best.similarity, res.versions[0].similarity);
  EXPECT_LE(res.sentences_added, 1);
  for (const auto& v : res.versions) EXPECT_LE(v.similarity, res.best.similarity);

  VerboseRewriter verbose;
  const auto capped = include_themes(p.title, p.abstract, adv, w.ctx(AttackBudget::automatic(), &verbose));
  EXPECT_EQ(capped.versions.size(), 1u);
  EXPECT_EQ(capped.best.text, p.abstract);
  EXPECT_EQ(capped.warnings.size(), 5u);
}

TEST(InsertKeywords, RespectsKeywordCap) {
  World w;
  const auto& p = w.paper();
  const auto adv = curate_adversarial_archive(p, w.matcher->default_archive_of("r0005"), 1, 0, *w.matcher);
  const DraftAbstract start{p.abstract, 0, {"original"}, 0.0};
  const auto res = insert_keywords(p.title, start, adv, w.ctx(AttackBudget::parse("M=4,K=5")));
  EXPECT_LE(res.keywords_inserted, 10);
  EXPECT_GE(res.best.similarity, res.versions[0].similarity);
  const auto limited = insert_keywords(p.title, start, adv, w.ctx(AttackBudget::parse("M=2,K=5")), 3);
  EXPECT_LE(limited.keywords_inserted, 3);
}

TEST(RunAttack, ZeroBudgetMatchesNaturalAndCurationOnly) {
  World w;
  const auto pm = PoolingPolicy::mean();
  const auto ctx = w.ctx(AttackBudget::parse("N=0,M=0,K=0"));
  for (const auto& pid : w.corpus.submissions) {
    const auto& p = w.corpus.paper(pid);
    const std::string rid = "r0011";
    const auto n = w.matcher->default_archive_of(rid).size();
    const auto full = run_attack({pid, rid, {rid, pid, n, 0, true}, false}, ctx);
    ASSERT_FALSE(full.failed) << full.error;
    EXPECT_EQ(full.manipulated_rank, full.natural_rank);
    EXPECT_EQ(full.natural_rank, w.matcher->natural_rank(p, rid, pm));
    const auto one = run_attack({pid, rid, {rid, pid, 1, 4, true}, false}, ctx);
    EXPECT_EQ(one.manipulated_rank, curation_only_ranking(p, rid, *w.matcher, pm, 1, 4));
  }
  EXPECT_EQ(w.stub.calls(), 0u);
}

TEST(RunAttack, FinalSimilarityNeverBelowOriginal) {
  World w;
  const auto ctx = w.ctx(AttackBudget::automatic());
  for (const auto& pid : w.corpus.submissions) {
    const auto o = run_attack({pid, "r0020", {"r0020", pid, 1, 0, true}, false}, ctx);
    ASSERT_FALSE(o.failed) << o.error;
    EXPECT_GE(o.final_similarity, o.original_similarity);
    EXPECT_LE(o.budget_used.keywords_inserted, 10);
    EXPECT_LE(o.budget_used.sentences_added, 1);
    EXPECT_LE(o.manipulated_rank, o.natural_rank);
    EXPECT_EQ(o.trace.front().stage, "original");
  }
}

TEST(RunAttack, RewriteFailuresDegradeToWarnings) {
  World w;
  FailingRewriter failing;
  const auto pid = *w.corpus.submissions.begin();
  const auto o = run_attack({pid, "r0007", {"r0007", pid, 1, 0, true}, false}, w.ctx(AttackBudget::automatic(), &failing));
  EXPECT_FALSE(o.failed);
  EXPECT_EQ(o.final_similarity, o.original_similarity);
  EXPECT_GE(o.warnings.size(), 7u);
}

TEST(RunAttack, UnknownReviewerFailsAtNaturalStage) {
  World w;
  const auto pid = *w.corpus.submissions.begin();
  const auto o = run_attack({pid, "ghost", {}, false}, w.ctx(AttackBudget::automatic()));
  EXPECT_TRUE(o.failed);
  EXPECT_EQ(o.failed_stage, "natural");
}

TEST(EarlyStopping, StopsBeforeAnyRewriteWhenAlreadyFirst) {
  World w;
  const auto& p = w.paper();
  const auto pm = PoolingPolicy::mean();
  // The top natural reviewer, curated, already leads a proxy made of the same pool.
  const auto ranking = w.matcher->rank_reviewers(p, w.matcher->default_pool(), pm);
  const std::string rid = ranking.entries.front().reviewer_id;
  const EarlyStopping es{w.matcher.get(), pm};
  AttackContext ctx = w.ctx(AttackBudget::automatic());
  ctx.early_stopping = &es;
  const auto o = run_attack({p.id, rid, {rid, p.id, 1, 0, true}, false}, ctx);
  ASSERT_FALSE(o.failed) << o.error;
  EXPECT_TRUE(o.stopped_early);
  EXPECT_EQ(w.stub.calls(), 0u);
  EXPECT_EQ(o.final_draft.text, p.abstract);

  const auto adv = w.matcher->default_archive_of(ranking.entries[2].reviewer_id);
  const auto v = early_stopping_check(p.title, p.abstract, adv, *w.matcher, *w.matcher, pm);
  EXPECT_EQ(v.proxy_rank, ranking.entries[2].rank);
  EXPECT_EQ(v.stop, v.proxy_rank == 1);
}

namespace {

class ScriptedOperator final : public HumanOperator {
 public:
  int drafts_seen = 0;
  bool constraints_ok(std::string_view s) override {
    ++drafts_seen;
    return s.find("garbled") == std::string_view::npos;
  }
  std::optional<std::string> themed_version(std::string_view original, int,
                                            const std::optional<std::string>& suggestion) override {
    return suggestion ? *suggestion : std::string(original);
  }
  std::optional<std::string> next_edit(std::string_view, int, int) override { return std::nullopt; }
  std::vector<std::string> keyword_drafts(std::string_view current, std::string_view keyword) override {
    // Only the sixth draft would pass; the cap stops at five.
    std::vector<std::string> out(5, std::string(current) + " garbled " + std::string(keyword));
    out.push_back(std::string(current) + " " + std::string(keyword));
    return out;
  }
};

}  // namespace

TEST(HumanMode, OperatorDrivesThemesAndDraftCap) {
  World w;
  const auto& p = w.paper();
  ScriptedOperator op;
  AttackContext ctx = w.ctx(AttackBudget::parse("N=2,M=1,K=2", AttackBudget::human_in_the_loop()));
  ctx.human = &op;
  const auto adv = curate_adversarial_archive(p, w.matcher->default_archive_of("r0001"), 1, 0, *w.matcher);
  const auto themes = include_themes(p.title, p.abstract, adv, ctx);
  EXPECT_EQ(themes.versions.size(), 3u);
  const auto kw = insert_keywords(p.title, themes.best, adv, ctx);
  EXPECT_EQ(kw.keywords_inserted, 0);
  EXPECT_EQ(kw.best.text, themes.best.text);

  AttackContext no_human = w.ctx(AttackBudget::human_in_the_loop());
  const auto o = run_attack({p.id, "r0001", {"r0001", p.id, 1, 0, true}, false}, no_human);
  EXPECT_TRUE(o.failed);
  EXPECT_EQ(o.failed_stage, "themes");
}
