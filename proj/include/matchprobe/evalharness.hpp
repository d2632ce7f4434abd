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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "matchprobe/matcher.hpp"
#include "matchprobe/text_attack.hpp"

namespace matchprobe {

struct EvalSample {
  std::string paper_id;
  std::string reviewer_id;
  int natural_rank = 0;
  double natural_similarity = 0.0;
};

struct SampleConstraints {
  // Reviewers with fewer publications are not eligible (0 disables).
  std::size_t min_publications = 0;
};

// Every (submission, reviewer) pair at competition rank `target_rank`. When
// ties leave that rank empty for a paper, the reviewers at the next occupied
// rank are taken instead. Ordered by paper id, then ranking order.
std::vector<EvalSample> eligible_pairs(const Matcher& matcher, int target_rank, const PoolingPolicy& pooling,
                                       const SampleConstraints& constraints = {});

// n pairs drawn uniformly without replacement from eligible_pairs. Throws
// SamplingError when fewer than n are eligible.
std::vector<EvalSample> sample_eval_pairs(const Matcher& matcher, int target_rank, std::size_t n, std::uint64_t seed,
                                          const PoolingPolicy& pooling, const SampleConstraints& constraints = {});
std::vector<EvalSample> sample_from(std::vector<EvalSample> eligible, std::size_t n, std::uint64_t seed);

struct SuccessRate {
  int k = 0;
  double rate = 0.0;
  double se = 0.0;
};

struct SuccessTable {
  std::vector<SuccessRate> rates;
  double mean_rank = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;
  // Outcomes left out because their attack failed.
  std::size_t failed = 0;

  const SuccessRate& at(int k) const;
};

inline const std::vector<int> kDefaultKs{1, 3, 5};

// Rate p = |{rank <= k}| / n with SE sqrt(p(1-p)/n); mean rank with
// 95% CI mean +- 1.96 s / sqrt(n), s the sample standard deviation.
SuccessTable success_rates_from_ranks(std::span<const int> ranks, const std::vector<int>& ks = kDefaultKs);
SuccessTable success_rates(std::span<const AttackOutcome> outcomes, const std::vector<int>& ks = kDefaultKs);

struct EvalConfig {
  PoolingPolicy pooling;
  AttackBudget budget;
  std::size_t keep_k = 1;
  bool curate = true;
  std::uint64_t seed = 0;
  bool zero_floor = false;
  text::WordFilter word_filter;
  const EarlyStopping* early_stopping = nullptr;
  unsigned threads = 1;
};

// Per-sample curation seed; depends on the pair, not on its sample position.
std::uint64_t curation_seed(std::uint64_t base, const EvalSample& sample);

struct EvalRun {
  std::vector<AttackOutcome> outcomes;  // sample order
  SuccessTable table;
};

EvalRun evaluate(const Matcher& matcher, const RewriteProvider& rewriter, std::span<const EvalSample> samples,
                 const EvalConfig& config);

struct SweepCell {
  std::string axis;  // "N" or "MK"
  int N = 0;
  int M = 0;
  int K = 0;
  std::optional<SuccessTable> table;
  bool complete = true;
  std::string error;
};

// N cells run with M = K = 0; (M, K) cells run with N = 0.
std::vector<SweepCell> budget_sweep(const Matcher& matcher, const RewriteProvider& rewriter,
                                    std::span<const EvalSample> samples, const std::vector<int>& N_grid,
                                    const std::vector<std::pair<int, int>>& MK_grid, const EvalConfig& config);

struct PoolingComparison {
  SuccessTable mean;
  SuccessTable max;
  std::vector<AttackOutcome> mean_outcomes;
  std::vector<AttackOutcome> max_outcomes;
};

// Abstract modification only; archives stay uncurated.
PoolingComparison pooling_comparison(const Matcher& matcher, const RewriteProvider& rewriter,
                                     std::span<const EvalSample> samples_mean, std::span<const EvalSample> samples_max,
                                     const EvalConfig& config);

struct ArchiveLengthRow {
  std::size_t keep_k = 0;
  SuccessTable table;
};

struct ArchiveLengthSweep {
  std::vector<ArchiveLengthRow> rows;
  // Pairs whose reviewer has fewer than max(keep_values) archive papers.
  std::vector<std::string> excluded;
};

// With text_attack false the budget is zeroed and only curation acts.
ArchiveLengthSweep archive_length_sweep(const Matcher& matcher, const RewriteProvider& rewriter,
                                       std::span<const EvalSample> samples, const std::vector<std::size_t>& keep_values,
                                       const EvalConfig& config, bool text_attack = true);

// Spearman's rho with average ranks for ties. Throws DegenerateInputError
// when either vector is constant or the sizes differ or are below 2.
double spearman(std::span<const double> a, std::span<const double> b);
std::vector<double> average_ranks(std::span<const double> values);

struct CorrelationRow {
  int natural_rank = 0;
  std::size_t n = 0;
  std::optional<double> rho;
  std::string note;
  std::vector<int> current_ranks;
  std::vector<int> proxy_ranks;
};

// Re-ranks each outcome's final draft and curated archive against the proxy
// pool and correlates with the current manipulated ranks, per natural rank.
std::vector<CorrelationRow> cross_year_correlation(std::span<const AttackOutcome> outcomes, const Matcher& matcher,
                                                   const Matcher& proxy, const PoolingPolicy& pooling);

struct QuartileSplit {
  double q25 = 0.0;
  double q75 = 0.0;
  std::optional<SuccessTable> bottom;
  std::optional<SuccessTable> top;
  std::size_t bottom_n = 0;
  std::size_t top_n = 0;
  std::vector<std::string> notes;
};

// Thresholds are nearest-rank 25th/75th percentiles of natural_similarity
// over `population`; bottom holds samples <= q25, top those >= q75.
QuartileSplit quartile_stratify(std::span<const EvalSample> population, std::span<const EvalSample> samples,
                                std::span<const AttackOutcome> outcomes);

struct CurvePoint {
  int rank = 0;  // 1-based position in the sorted ranking
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

struct RankingCurve {
  std::vector<CurvePoint> points;
  std::vector<std::string> notes;
};

RankingCurve ranking_similarity_curve(const Matcher& matcher, const PoolingPolicy& pooling,
                                      const std::vector<int>& rank_points);

// Reports. CSV header: rank,k,rate,se,mean,ci_lo,ci_hi,n.
void write_success_csv(std::ostream& out, const std::vector<std::pair<int, SuccessTable>>& rows);
void write_outcomes_jsonl(std::ostream& out, std::span<const AttackOutcome> outcomes);
nlohmann::json to_json(const SuccessTable& table);
nlohmann::json to_json(const EvalSample& sample);

}  // namespace matchprobe
