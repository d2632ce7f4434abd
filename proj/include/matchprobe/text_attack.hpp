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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "matchprobe/corpus.hpp"
#include "matchprobe/curation.hpp"
#include "matchprobe/matcher.hpp"
#include "matchprobe/rewrite.hpp"
#include "matchprobe/text.hpp"

namespace matchprobe {

enum class AttackMode { automatic, human_in_the_loop };

std::string_view to_string(AttackMode mode);
AttackMode parse_attack_mode(std::string_view s);

struct AttackBudget {
  int N = 5;  // IncludeThemes versions
  int M = 2;  // keyword batches
  int K = 5;  // keywords per batch
  double delta = 0.01;
  int sentence_cap = 1;
  int keyword_cap = 10;
  AttackMode mode = AttackMode::automatic;
  int drafts_per_keyword = 5;
  // Bound on the manual edit loop of a single themed version.
  int max_edit_rounds = 20;

  static AttackBudget automatic();
  static AttackBudget human_in_the_loop();

  // Parses "N=5,M=2,K=5[,delta=0.01,cap=10,sentences=1]" on top of `base`.
  static AttackBudget parse(std::string_view spec, AttackBudget base = automatic());
  std::string to_string() const;

  // Invariant violations. With strict_keyword_cap, M*K > keyword_cap is one.
  std::vector<std::string> problems(bool strict_keyword_cap = false) const;
};

nlohmann::json to_json(const AttackBudget& budget);
AttackBudget attack_budget_from_json(const nlohmann::json& j, AttackBudget base = AttackBudget::automatic());

struct DraftAbstract {
  std::string text;
  int version_index = 0;
  std::vector<std::string> provenance;
  double similarity = 0.0;
};

struct TracePoint {
  std::string stage;  // "original" | "themes" | "keywords"
  int version = 0;
  double similarity = 0.0;
};

// ConstraintsCheck and the manual steps of the human-in-the-loop mode.
class HumanOperator {
 public:
  virtual ~HumanOperator() = default;
  // Coherence and consistency judgment.
  virtual bool constraints_ok(std::string_view abstract) = 0;
  // Starting point for themed version `version`; `suggestion` is the rewrite
  // provider's draft, if one was produced. nullopt skips the version.
  virtual std::optional<std::string> themed_version(std::string_view original, int version,
                                                    const std::optional<std::string>& suggestion) = 0;
  // Next incremental edit of `current`; nullopt ends the edit loop.
  virtual std::optional<std::string> next_edit(std::string_view current, int version, int round) = 0;
  // Candidate ways of inserting `keyword` into `current`. Only the first
  // AttackBudget::drafts_per_keyword are considered.
  virtual std::vector<std::string> keyword_drafts(std::string_view current, std::string_view keyword) = 0;
};

struct EarlyStopVerdict {
  bool stop = false;
  int proxy_rank = 0;
};

// Proxy pool used by the early-stopping heuristic, typically a prior year.
struct EarlyStopping {
  const Matcher* proxy = nullptr;
  PoolingPolicy pooling;
};

// Shared inputs of the abstract-modification operations.
struct AttackContext {
  const Matcher& matcher;
  const RewriteProvider& rewriter;
  PoolingPolicy pooling;
  AttackBudget budget;
  text::WordFilter word_filter;
  const EarlyStopping* early_stopping = nullptr;
  HumanOperator* human = nullptr;
};

// S(new) + delta > S(cur), strictly.
bool similarity_check(std::string_view title, std::string_view new_draft, std::string_view cur_draft,
                      const Archive& adv_archive, double delta, const Matcher& matcher, const PoolingPolicy& pooling);

// Colluder (with `adv_archive`) holds competition rank 1 against every proxy
// reviewer for the paper with abstract `draft`.
EarlyStopVerdict early_stopping_check(std::string_view title, std::string_view draft, const Archive& adv_archive,
                                      const Matcher& matcher, const Matcher& proxy, const PoolingPolicy& pooling);

struct KeywordSearch {
  std::vector<std::string> keywords;
  // similarities[i] is S after appending keywords[0..i].
  std::vector<double> similarities;
  double base_similarity = 0.0;
  std::vector<std::string> warnings;
};

// Candidate words: filtered tokens of the archive titles and abstracts, first
// occurrence order. Greedy: each step scores "{draft} {k0} ... {w}" for every
// candidate, keeps the first maximizer, and stops once the best score falls
// below the running similarity.
std::vector<std::string> keyword_vocabulary(const Archive& adv_archive, const Corpus& corpus,
                                            const text::WordFilter& filter);
KeywordSearch find_keywords(std::string_view title, std::string_view draft, const Archive& adv_archive, int K,
                            const Matcher& matcher, const PoolingPolicy& pooling, const text::WordFilter& filter = {});

struct ModificationResult {
  DraftAbstract best;
  std::vector<DraftAbstract> versions;  // versions[0] is the input
  bool stopped_early = false;
  int keywords_inserted = 0;
  int sentences_added = 0;
  std::vector<std::string> warnings;
};

ModificationResult include_themes(std::string_view title, std::string_view abstract, const Archive& adv_archive,
                                  const AttackContext& ctx);

// `keyword_allowance` caps insertions for this call (remaining keyword_cap).
ModificationResult insert_keywords(std::string_view title, const DraftAbstract& draft, const Archive& adv_archive,
                                   const AttackContext& ctx, std::optional<int> keyword_allowance = std::nullopt);

struct BudgetUsed {
  int themes_versions = 0;
  int keyword_batches = 0;
  int keywords_inserted = 0;
  int sentences_added = 0;
};

struct AttackOutcome {
  std::string paper_id;
  std::string reviewer_id;
  int natural_rank = 0;
  int manipulated_rank = 0;
  double natural_similarity = 0.0;
  double original_similarity = 0.0;  // to the adversarial archive, before modification
  double final_similarity = 0.0;     // to the adversarial archive, after modification
  double manipulated_pool_similarity = 0.0;
  Archive adv_archive;
  DraftAbstract final_draft;
  std::vector<TracePoint> trace;
  bool stopped_early = false;
  BudgetUsed budget_used;
  bool zero_floor = false;
  bool failed = false;
  std::string failed_stage;
  std::string error;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const AttackOutcome& outcome);

struct AttackRequest {
  std::string paper_id;
  std::string reviewer_id;
  CurationPlan curation;
  bool zero_floor = false;
};

// curate -> include_themes -> insert_keywords -> rank against the full pool
// (every other reviewer keeps a default archive). Stage failures are recorded
// in the outcome, not thrown.
AttackOutcome run_attack(const AttackRequest& request, const AttackContext& ctx);

}  // namespace matchprobe
