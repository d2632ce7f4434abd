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

#include "matchprobe/text_attack.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <unordered_set>

#include "matchprobe/error.hpp"

namespace matchprobe {
namespace {

using nlohmann::json;

std::vector<ArchivePaperText> archive_texts(const Archive& archive, const Corpus& corpus) {
  std::vector<ArchivePaperText> out;
  out.reserve(archive.size());
  for (const auto& pid : archive.paper_ids) {
    const auto& p = corpus.paper(pid);
    out.push_back({p.title, p.abstract});
  }
  return out;
}

double score(std::string_view title, std::string_view abstract, const Archive& adv, const AttackContext& ctx,
             CachePolicy policy = CachePolicy::persist) {
  return ctx.matcher.similarity(title, abstract, adv, ctx.pooling, policy);
}

// First maximal version; earlier versions win ties.
const DraftAbstract& argmax_version(const std::vector<DraftAbstract>& versions) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < versions.size(); ++i) {
    if (versions[i].similarity > versions[best].similarity) best = i;
  }
  return versions[best];
}

bool should_stop(std::string_view title, std::string_view draft, const Archive& adv, const AttackContext& ctx) {
  if (!ctx.early_stopping || !ctx.early_stopping->proxy) return false;
  return early_stopping_check(title, draft, adv, ctx.matcher, *ctx.early_stopping->proxy, ctx.early_stopping->pooling)
      .stop;
}

HumanOperator& require_human(const AttackContext& ctx) {
  if (!ctx.human) throw ContractError("human-in-the-loop mode needs a HumanOperator");
  return *ctx.human;
}

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw BudgetError("budget field " + std::string(key) + " is not an integer: " + std::string(v));
  }
  return out;
}

}  // namespace

std::string_view to_string(AttackMode mode) {
  return mode == AttackMode::automatic ? "automatic" : "human_in_the_loop";
}

AttackMode parse_attack_mode(std::string_view s) {
  if (s == "auto" || s == "automatic") return AttackMode::automatic;
  if (s == "human" || s == "human_in_the_loop" || s == "hitl") return AttackMode::human_in_the_loop;
  throw BudgetError("unknown attack mode: " + std::string(s));
}

AttackBudget AttackBudget::automatic() { return {}; }

AttackBudget AttackBudget::human_in_the_loop() {
  AttackBudget b;
  b.N = 10;
  b.sentence_cap = 3;
  b.mode = AttackMode::human_in_the_loop;
  return b;
}

AttackBudget AttackBudget::parse(std::string_view spec, AttackBudget base) {
  AttackBudget b = base;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = text::trim(spec.substr(0, comma));
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw BudgetError("budget item needs key=value: " + std::string(item));
    const auto key = text::trim(item.substr(0, eq));
    const auto val = text::trim(item.substr(eq + 1));
    if (key == "N") {
      b.N = parse_int(key, val);
    } else if (key == "M") {
      b.M = parse_int(key, val);
    } else if (key == "K") {
      b.K = parse_int(key, val);
    } else if (key == "cap" || key == "keyword_cap") {
      b.keyword_cap = parse_int(key, val);
    } else if (key == "sentences" || key == "sentence_cap") {
      b.sentence_cap = parse_int(key, val);
    } else if (key == "delta") {
      try {
        b.delta = std::stod(std::string(val));
      } catch (const std::logic_error&) {
        throw BudgetError("budget field delta is not a number: " + std::string(val));
      }
    } else {
      throw BudgetError("unknown budget field: " + std::string(key));
    }
  }
  return b;
}

std::string AttackBudget::to_string() const {
  return "N=" + std::to_string(N) + ",M=" + std::to_string(M) + ",K=" + std::to_string(K);
}

std::vector<std::string> AttackBudget::problems(bool strict_keyword_cap) const {
  std::vector<std::string> out;
  if (N < 0 || M < 0 || K < 0) out.push_back("N, M and K must be non-negative");
  if (delta < 0.0) out.push_back("delta must be non-negative");
  if (sentence_cap < 1) out.push_back("sentence_cap must be positive");
  if (keyword_cap < 1) out.push_back("keyword_cap must be positive");
  if (mode == AttackMode::automatic && sentence_cap != 1) out.push_back("automatic mode requires sentence_cap = 1");
  if (drafts_per_keyword < 1) out.push_back("drafts_per_keyword must be positive");
  if (strict_keyword_cap && static_cast<long>(M) * K > keyword_cap) {
    out.push_back("M*K = " + std::to_string(static_cast<long>(M) * K) + " exceeds keyword_cap " +
                  std::to_string(keyword_cap));
  }
  return out;
}

json to_json(const AttackBudget& b) {
  return {{"N", b.N},
          {"M", b.M},
          {"K", b.K},
          {"delta", b.delta},
          {"sentence_cap", b.sentence_cap},
          {"keyword_cap", b.keyword_cap},
          {"mode", to_string(b.mode)},
          {"drafts_per_keyword", b.drafts_per_keyword}};
}

AttackBudget attack_budget_from_json(const json& j, AttackBudget base) {
  if (j.is_string()) return AttackBudget::parse(j.get<std::string>(), base);
  if (!j.is_object()) throw BudgetError("budget must be an object or a \"N=..,M=..,K=..\" string");
  AttackBudget b = base;
  try {
    if (j.contains("mode")) {
      const auto mode = parse_attack_mode(j.at("mode").get<std::string>());
      if (mode != b.mode) b = mode == AttackMode::automatic ? AttackBudget::automatic() : AttackBudget::human_in_the_loop();
    }
    b.N = j.value("N", b.N);
    b.M = j.value("M", b.M);
    b.K = j.value("K", b.K);
    b.delta = j.value("delta", b.delta);
    b.sentence_cap = j.value("sentence_cap", b.sentence_cap);
    b.keyword_cap = j.value("keyword_cap", b.keyword_cap);
    b.drafts_per_keyword = j.value("drafts_per_keyword", b.drafts_per_keyword);
  } catch (const json::exception& e) {
    throw BudgetError(std::string("malformed budget: ") + e.what());
  }
  return b;
}

bool similarity_check(std::string_view title, std::string_view new_draft, std::string_view cur_draft,
                      const Archive& adv_archive, double delta, const Matcher& matcher, const PoolingPolicy& pooling) {
  const double s_new = matcher.similarity(title, new_draft, adv_archive, pooling);
  const double s_cur = matcher.similarity(title, cur_draft, adv_archive, pooling);
  return s_new + delta > s_cur;
}

EarlyStopVerdict early_stopping_check(std::string_view title, std::string_view draft, const Archive& adv_archive,
                                      const Matcher& matcher, const Matcher& proxy, const PoolingPolicy& pooling) {
  const EmbeddingVector query = matcher.embed_text(title, draft);
  const double colluder = matcher.similarity(query, adv_archive, pooling);
  int rank = 1;
  for (const auto& archive : proxy.default_pool()) {
    // The colluder competes with the curated archive, not a proxy-year copy.
    if (archive.reviewer_id == adv_archive.reviewer_id) continue;
    if (proxy.similarity(query, archive, pooling) > colluder) ++rank;
  }
  return {rank == 1, rank};
}

std::vector<std::string> keyword_vocabulary(const Archive& adv_archive, const Corpus& corpus,
                                            const text::WordFilter& filter) {
  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  for (const auto& pid : adv_archive.paper_ids) {
    const auto& p = corpus.paper(pid);
    for (const auto* field : {&p.title, &p.abstract}) {
      for (auto& tok : text::tokenize(*field)) {
        if (filter.accepts(tok) && seen.insert(tok).second) vocab.push_back(std::move(tok));
      }
    }
  }
  return vocab;
}

KeywordSearch find_keywords(std::string_view title, std::string_view draft, const Archive& adv_archive, int K,
                            const Matcher& matcher, const PoolingPolicy& pooling, const text::WordFilter& filter) {
  KeywordSearch out;
  out.base_similarity = matcher.similarity(title, draft, adv_archive, pooling);
  if (K <= 0) return out;
  const auto vocab = keyword_vocabulary(adv_archive, matcher.corpus(), filter);
  if (vocab.empty()) {
    out.warnings.push_back("no candidate keywords left after filtering");
    return out;
  }
  double current = out.base_similarity;
  std::string appended(draft);
  for (int step = 0; step < K; ++step) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      const double s =
          matcher.similarity(title, appended + " " + vocab[j], adv_archive, pooling, CachePolicy::transient);
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    if (best_score < current) break;
    out.keywords.push_back(vocab[best]);
    out.similarities.push_back(best_score);
    current = best_score;
    appended += " " + vocab[best];
  }
  return out;
}

ModificationResult include_themes(std::string_view title, std::string_view abstract, const Archive& adv_archive,
                                  const AttackContext& ctx) {
  const AttackBudget& b = ctx.budget;
  ModificationResult r;
  r.versions.push_back({std::string(abstract), 0, {"original"}, score(title, abstract, adv_archive, ctx)});
  const auto archive = archive_texts(adv_archive, ctx.matcher.corpus());

  for (int i = 1; i <= b.N; ++i) {
    if (should_stop(title, r.versions.back().text, adv_archive, ctx)) {
      r.stopped_early = true;
      r.best = r.versions.back();
      r.sentences_added = static_cast<int>(text::added_sentence_count(abstract, r.best.text));
      return r;
    }
    RewriteRequest req{RewriteKind::themes, std::string(title), std::string(abstract), archive, {}, "themes-auto", i};
    std::optional<std::string> candidate;
    if (b.mode == AttackMode::automatic) {
      try {
        candidate = ctx.rewriter.rewrite(req).abstract;
      } catch (const Error& e) {
        r.warnings.push_back("themes version " + std::to_string(i) + " skipped: " + e.what());
        continue;
      }
      if (const auto added = text::added_sentence_count(abstract, *candidate); static_cast<int>(added) > b.sentence_cap) {
        r.warnings.push_back("themes version " + std::to_string(i) + " skipped: adds " + std::to_string(added) +
                             " sentences, cap is " + std::to_string(b.sentence_cap));
        continue;
      }
    } else {
      HumanOperator& human = require_human(ctx);
      req.template_id = "themes-human";
      std::optional<std::string> suggestion;
      try {
        suggestion = ctx.rewriter.rewrite(req).abstract;
      } catch (const Error& e) {
        r.warnings.push_back("themes suggestion " + std::to_string(i) + " unavailable: " + e.what());
      }
      auto start = human.themed_version(abstract, i, suggestion);
      if (!start) continue;
      std::string cur = std::move(*start);
      const auto acceptable = [&](const std::string& s) {
        return human.constraints_ok(s) && static_cast<int>(text::added_sentence_count(abstract, s)) <= b.sentence_cap;
      };
      bool done = false;
      for (int round = 0; round < b.max_edit_rounds; ++round) {
        auto edit = human.next_edit(cur, i, round);
        if (edit && similarity_check(title, *edit, cur, adv_archive, b.delta, ctx.matcher, ctx.pooling)) {
          cur = std::move(*edit);
        }
        if (acceptable(cur)) {
          done = true;
          break;
        }
        if (!edit) break;
      }
      if (!done) {
        r.warnings.push_back("themes version " + std::to_string(i) + " abandoned: constraints never satisfied");
        continue;
      }
      candidate = std::move(cur);
    }
    DraftAbstract v{*candidate, i, {"original", "themes:v" + std::to_string(i)}, 0.0};
    v.similarity = score(title, v.text, adv_archive, ctx);
    r.versions.push_back(std::move(v));
  }
  r.best = argmax_version(r.versions);
  r.sentences_added = static_cast<int>(text::added_sentence_count(abstract, r.best.text));
  return r;
}

ModificationResult insert_keywords(std::string_view title, const DraftAbstract& draft, const Archive& adv_archive,
                                   const AttackContext& ctx, std::optional<int> keyword_allowance) {
  const AttackBudget& b = ctx.budget;
  const int allowance = std::min(keyword_allowance.value_or(b.keyword_cap), b.keyword_cap);
  ModificationResult r;
  DraftAbstract v0 = draft;
  v0.version_index = 0;
  v0.similarity = score(title, draft.text, adv_archive, ctx);
  r.versions.push_back(v0);
  std::vector<int> inserted_at{0};
  const auto archive = archive_texts(adv_archive, ctx.matcher.corpus());
  std::string current = draft.text;
  int inserted = 0;

  const auto finish = [&](const DraftAbstract& chosen) {
    r.best = chosen;
    const auto idx = static_cast<std::size_t>(&chosen - r.versions.data());
    r.keywords_inserted = inserted_at[idx];
  };

  for (int i = 1; i <= b.M; ++i) {
    if (should_stop(title, r.versions.back().text, adv_archive, ctx)) {
      r.stopped_early = true;
      finish(r.versions.back());
      return r;
    }
    const int remaining = allowance - inserted;
    if (remaining <= 0) break;
    const auto search = find_keywords(title, current, adv_archive, std::min(b.K, remaining), ctx.matcher, ctx.pooling,
                                      ctx.word_filter);
    r.warnings.insert(r.warnings.end(), search.warnings.begin(), search.warnings.end());

    std::vector<std::string> accepted;
    if (!search.keywords.empty()) {
      if (b.mode == AttackMode::automatic) {
        RewriteRequest req{RewriteKind::keywords, std::string(title), current, archive, search.keywords,
                           "keywords-auto", i};
        try {
          RewriteResponse resp = ctx.rewriter.rewrite(req);
          for (const auto& k : search.keywords) {
            if (!resp.rejected.contains(k)) accepted.push_back(k);
          }
          current = std::move(resp.abstract);
        } catch (const Error& e) {
          r.warnings.push_back("keyword batch " + std::to_string(i) + " skipped: " + e.what());
        }
      } else {
        HumanOperator& human = require_human(ctx);
        for (const auto& w : search.keywords) {
          auto drafts = human.keyword_drafts(current, w);
          if (static_cast<int>(drafts.size()) > b.drafts_per_keyword) drafts.resize(b.drafts_per_keyword);
          bool kept = false;
          for (auto& d : drafts) {
            if (human.constraints_ok(d) && similarity_check(title, d, current, adv_archive, 0.0, ctx.matcher, ctx.pooling)) {
              current = std::move(d);
              kept = true;
            }
          }
          if (kept) accepted.push_back(w);
        }
      }
    }
    inserted += static_cast<int>(accepted.size());
    DraftAbstract v{current, i, r.versions.back().provenance, 0.0};
    std::string step = "keywords:batch" + std::to_string(i) + "[";
    for (std::size_t k = 0; k < accepted.size(); ++k) step += (k ? "," : "") + accepted[k];
    v.provenance.push_back(step + "]");
    v.similarity = score(title, current, adv_archive, ctx);
    r.versions.push_back(std::move(v));
    inserted_at.push_back(inserted);
  }
  finish(argmax_version(r.versions));
  return r;
}

json to_json(const AttackOutcome& o) {
  json trace = json::array();
  for (const auto& t : o.trace) trace.push_back({{"stage", t.stage}, {"version", t.version}, {"similarity", t.similarity}});
  return {{"paper_id", o.paper_id},
          {"reviewer_id", o.reviewer_id},
          {"natural_rank", o.natural_rank},
          {"manipulated_rank", o.manipulated_rank},
          {"natural_similarity", o.natural_similarity},
          {"original_similarity", o.original_similarity},
          {"final_similarity", o.final_similarity},
          {"manipulated_pool_similarity", o.manipulated_pool_similarity},
          {"adv_archive", o.adv_archive.paper_ids},
          {"final_abstract", o.final_draft.text},
          {"final_version", o.final_draft.version_index},
          {"provenance", o.final_draft.provenance},
          {"trace", std::move(trace)},
          {"stopped_early", o.stopped_early},
          {"budget_used",
           {{"themes_versions", o.budget_used.themes_versions},
            {"keyword_batches", o.budget_used.keyword_batches},
            {"keywords_inserted", o.budget_used.keywords_inserted},
            {"sentences_added", o.budget_used.sentences_added}}},
          {"zero_floor", o.zero_floor},
          {"failed", o.failed},
          {"failed_stage", o.failed_stage},
          {"error", o.error},
          {"warnings", o.warnings}};
}

AttackOutcome run_attack(const AttackRequest& request, const AttackContext& ctx) {
  AttackOutcome o;
  o.paper_id = request.paper_id;
  o.reviewer_id = request.reviewer_id;
  o.zero_floor = request.zero_floor;
  std::string stage = "natural";
  try {
    const Matcher& m = ctx.matcher;
    const PaperRecord& paper = m.corpus().paper(request.paper_id);
    const auto natural = m.rank_reviewers(paper, m.default_pool(), ctx.pooling);
    const RankEntry* self = natural.find(request.reviewer_id);
    if (!self) throw NotFoundError("reviewer not in pool: " + request.reviewer_id);
    o.natural_rank = self->rank;
    o.natural_similarity = self->similarity;

    stage = "curation";
    CurationPlan plan = request.curation;
    plan.reviewer_id = request.reviewer_id;
    plan.target_paper_id = request.paper_id;
    o.adv_archive = apply_curation(plan, m, &o.warnings);

    stage = "themes";
    auto themes = include_themes(paper.title, paper.abstract, o.adv_archive, ctx);
    o.warnings.insert(o.warnings.end(), themes.warnings.begin(), themes.warnings.end());
    o.original_similarity = themes.versions.front().similarity;
    for (const auto& v : themes.versions) {
      o.trace.push_back({v.version_index == 0 ? "original" : "themes", v.version_index, v.similarity});
    }
    o.budget_used.themes_versions = static_cast<int>(themes.versions.size()) - 1;
    o.budget_used.sentences_added = themes.sentences_added;
    o.final_draft = themes.best;
    o.stopped_early = themes.stopped_early;

    if (!o.stopped_early) {
      stage = "keywords";
      auto kw = insert_keywords(paper.title, themes.best, o.adv_archive, ctx);
      o.warnings.insert(o.warnings.end(), kw.warnings.begin(), kw.warnings.end());
      for (std::size_t i = 1; i < kw.versions.size(); ++i) {
        o.trace.push_back({"keywords", kw.versions[i].version_index, kw.versions[i].similarity});
      }
      o.budget_used.keyword_batches = static_cast<int>(kw.versions.size()) - 1;
      o.budget_used.keywords_inserted = kw.keywords_inserted;
      o.final_draft = kw.best;
      o.stopped_early = kw.stopped_early;
      o.budget_used.sentences_added =
          static_cast<int>(text::added_sentence_count(paper.abstract, o.final_draft.text));
    }
    o.final_similarity = o.final_draft.similarity;

    stage = "ranking";
    const auto query = m.embed_text(paper.title, o.final_draft.text);
    const auto pool = substitute_archive(m.default_pool(), o.adv_archive);
    const auto manipulated = m.rank_reviewers(query, paper.id, pool, ctx.pooling, request.zero_floor);
    const RankEntry* mine = manipulated.find(request.reviewer_id);
    o.manipulated_rank = mine->rank;
    o.manipulated_pool_similarity = mine->similarity;
  } catch (const std::exception& e) {
    o.failed = true;
    o.failed_stage = stage;
    o.error = e.what();
  }
  return o;
}

}  // namespace matchprobe
