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

#include "matchprobe/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

#include "matchprobe/error.hpp"
#include "matchprobe/hash.hpp"
#include "matchprobe/rng.hpp"

namespace matchprobe {
namespace {

using nlohmann::json;

double sample_sd(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Nearest-rank percentile of an ascending vector.
double nearest_rank(const std::vector<double>& sorted, double q) {
  auto idx = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(sorted.size())));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<EvalSample> eligible_pairs(const Matcher& matcher, int target_rank, const PoolingPolicy& pooling,
                                       const SampleConstraints& constraints) {
  if (target_rank < 1) throw ContractError("target rank must be positive");
  const Corpus& corpus = matcher.corpus();
  if (corpus.submissions.empty()) throw DegenerateInputError("corpus " + corpus.label + " has no submissions");
  std::vector<EvalSample> out;
  for (const auto& pid : corpus.submissions) {
    const auto ranking = matcher.rank_reviewers(corpus.paper(pid), matcher.default_pool(), pooling);
    // Entries are sorted, so the first rank >= target is the selected one.
    const auto first = std::find_if(ranking.entries.begin(), ranking.entries.end(),
                                    [&](const RankEntry& e) { return e.rank >= target_rank; });
    if (first == ranking.entries.end()) continue;
    const int chosen = first->rank;
    for (auto it = first; it != ranking.entries.end() && it->rank == chosen; ++it) {
      if (constraints.min_publications > 0 &&
          corpus.reviewer(it->reviewer_id).publications.size() < constraints.min_publications) {
        continue;
      }
      out.push_back({pid, it->reviewer_id, it->rank, it->similarity});
    }
  }
  return out;
}

std::vector<EvalSample> sample_from(std::vector<EvalSample> eligible, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ContractError("sample size must be positive");
  if (eligible.size() < n) {
    throw SamplingError("only " + std::to_string(eligible.size()) + " eligible pairs, " + std::to_string(n) +
                            " requested",
                        eligible.size());
  }
  // Partial Fisher-Yates: the first n slots are a uniform draw without replacement.
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(n);
  return eligible;
}

std::vector<EvalSample> sample_eval_pairs(const Matcher& matcher, int target_rank, std::size_t n, std::uint64_t seed,
                                          const PoolingPolicy& pooling, const SampleConstraints& constraints) {
  return sample_from(eligible_pairs(matcher, target_rank, pooling, constraints), n, seed);
}

const SuccessRate& SuccessTable::at(int k) const {
  for (const auto& r : rates) {
    if (r.k == k) return r;
  }
  throw NotFoundError("no success rate for k=" + std::to_string(k));
}

SuccessTable success_rates_from_ranks(std::span<const int> ranks, const std::vector<int>& ks) {
  if (ranks.empty()) throw DegenerateInputError("success rates need at least one outcome");
  SuccessTable t;
  t.n = ranks.size();
  const double n = static_cast<double>(t.n);
  for (const int k : ks) {
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](int r) { return r <= k; });
    const double p = static_cast<double>(hits) / n;
    t.rates.push_back({k, p, std::sqrt(p * (1.0 - p) / n)});
  }
  std::vector<double> xs(ranks.begin(), ranks.end());
  double sum = 0.0;
  for (const double x : xs) sum += x;
  t.mean_rank = sum / n;
  const double half = 1.96 * sample_sd(xs, t.mean_rank) / std::sqrt(n);
  t.ci_lo = t.mean_rank - half;
  t.ci_hi = t.mean_rank + half;
  return t;
}

SuccessTable success_rates(std::span<const AttackOutcome> outcomes, const std::vector<int>& ks) {
  std::vector<int> ranks;
  std::size_t failed = 0;
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++failed;
    } else {
      ranks.push_back(o.manipulated_rank);
    }
  }
  if (ranks.empty()) {
    throw DegenerateInputError(outcomes.empty() ? "success rates need at least one outcome"
                                                : "every attack in the batch failed");
  }
  SuccessTable t = success_rates_from_ranks(ranks, ks);
  t.failed = failed;
  return t;
}

std::uint64_t curation_seed(std::uint64_t base, const EvalSample& sample) {
  std::uint64_t h = fnv1a64(sample.paper_id);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(sample.reviewer_id, h);
  return SplitMix64(base ^ h).next();
}

EvalRun evaluate(const Matcher& matcher, const RewriteProvider& rewriter, std::span<const EvalSample> samples,
                 const EvalConfig& config) {
  EvalRun run;
  run.outcomes.resize(samples.size());
  const AttackContext ctx{matcher, rewriter, config.pooling, config.budget, config.word_filter,
                          config.early_stopping, nullptr};
  const auto run_one = [&](std::size_t i) {
    const EvalSample& s = samples[i];
    AttackRequest req;
    req.paper_id = s.paper_id;
    req.reviewer_id = s.reviewer_id;
    req.curation = {s.reviewer_id, s.paper_id, config.keep_k, curation_seed(config.seed, s), config.curate};
    req.zero_floor = config.zero_floor;
    run.outcomes[i] = run_attack(req, ctx);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(samples.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) run_one(i);
      });
    }
    for (auto& w : workers) w.join();
  }
  if (!samples.empty()) run.table = success_rates(run.outcomes);
  return run;
}

std::vector<SweepCell> budget_sweep(const Matcher& matcher, const RewriteProvider& rewriter,
                                    std::span<const EvalSample> samples, const std::vector<int>& N_grid,
                                    const std::vector<std::pair<int, int>>& MK_grid, const EvalConfig& config) {
  if (N_grid.empty() && MK_grid.empty()) throw ContractError("budget sweep needs a non-empty grid");
  std::vector<SweepCell> cells;
  for (const int N : N_grid) cells.push_back({"N", N, 0, 0, std::nullopt, true, {}});
  for (const auto& [M, K] : MK_grid) cells.push_back({"MK", 0, M, K, std::nullopt, true, {}});
  for (auto& cell : cells) {
    EvalConfig cfg = config;
    cfg.budget.N = cell.N;
    cfg.budget.M = cell.M;
    cfg.budget.K = cell.K;
    try {
      const auto run = evaluate(matcher, rewriter, samples, cfg);
      cell.table = run.table;
      for (const auto& o : run.outcomes) {
        if (o.failed) {
          cell.complete = false;
          cell.error = o.failed_stage + ": " + o.error;
          break;
        }
      }
    } catch (const std::exception& e) {
      cell.complete = false;
      cell.error = e.what();
    }
  }
  return cells;
}

PoolingComparison pooling_comparison(const Matcher& matcher, const RewriteProvider& rewriter,
                                     std::span<const EvalSample> samples_mean, std::span<const EvalSample> samples_max,
                                     const EvalConfig& config) {
  EvalConfig cfg = config;
  cfg.curate = false;
  PoolingComparison out;
  cfg.pooling = PoolingPolicy::mean();
  auto mean_run = evaluate(matcher, rewriter, samples_mean, cfg);
  cfg.pooling = PoolingPolicy::max();
  auto max_run = evaluate(matcher, rewriter, samples_max, cfg);
  out.mean = mean_run.table;
  out.max = max_run.table;
  out.mean_outcomes = std::move(mean_run.outcomes);
  out.max_outcomes = std::move(max_run.outcomes);
  return out;
}

ArchiveLengthSweep archive_length_sweep(const Matcher& matcher, const RewriteProvider& rewriter,
                                       std::span<const EvalSample> samples, const std::vector<std::size_t>& keep_values,
                                       const EvalConfig& config, bool text_attack) {
  if (keep_values.empty()) throw ContractError("archive-length sweep needs keep values");
  const std::size_t need = *std::max_element(keep_values.begin(), keep_values.end());
  ArchiveLengthSweep out;
  std::vector<EvalSample> kept;
  for (const auto& s : samples) {
    const auto have = matcher.default_archive_of(s.reviewer_id).size();
    if (have < need) {
      out.excluded.push_back(s.paper_id + "/" + s.reviewer_id + ": archive has " + std::to_string(have) +
                             " papers, sweep needs " + std::to_string(need));
    } else {
      kept.push_back(s);
    }
  }
  if (kept.empty()) throw DegenerateInputError("no sample has an archive long enough for the sweep");
  EvalConfig cfg = config;
  cfg.curate = true;
  if (!text_attack) {
    cfg.budget.N = 0;
    cfg.budget.M = 0;
  }
  for (const std::size_t k : keep_values) {
    cfg.keep_k = k;
    out.rows.push_back({k, evaluate(matcher, rewriter, kept, cfg).table});
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DegenerateInputError("spearman needs vectors of equal length");
  if (a.size() < 2) throw DegenerateInputError("spearman needs at least two observations");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInputError("correlation undefined for a constant rank vector");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<CorrelationRow> cross_year_correlation(std::span<const AttackOutcome> outcomes, const Matcher& matcher,
                                                   const Matcher& proxy, const PoolingPolicy& pooling) {
  std::map<int, CorrelationRow> groups;
  for (const auto& o : outcomes) {
    if (o.failed) continue;
    const auto& paper = matcher.corpus().paper(o.paper_id);
    const auto verdict =
        early_stopping_check(paper.title, o.final_draft.text, o.adv_archive, matcher, proxy, pooling);
    auto& row = groups[o.natural_rank];
    row.natural_rank = o.natural_rank;
    row.current_ranks.push_back(o.manipulated_rank);
    row.proxy_ranks.push_back(verdict.proxy_rank);
  }
  std::vector<CorrelationRow> out;
  for (auto& [_, row] : groups) {
    row.n = row.current_ranks.size();
    const std::vector<double> a(row.current_ranks.begin(), row.current_ranks.end());
    const std::vector<double> b(row.proxy_ranks.begin(), row.proxy_ranks.end());
    try {
      row.rho = spearman(a, b);
    } catch (const DegenerateInputError& e) {
      row.note = e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

QuartileSplit quartile_stratify(std::span<const EvalSample> population, std::span<const EvalSample> samples,
                                std::span<const AttackOutcome> outcomes) {
  if (samples.size() != outcomes.size()) throw ContractError("samples and outcomes must align");
  if (population.empty()) throw DegenerateInputError("quartiles need a non-empty population");
  std::vector<double> sims;
  for (const auto& s : population) sims.push_back(s.natural_similarity);
  std::sort(sims.begin(), sims.end());
  QuartileSplit out;
  out.q25 = nearest_rank(sims, 25.0);
  out.q75 = nearest_rank(sims, 75.0);
  std::vector<AttackOutcome> bottom, top;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].natural_similarity <= out.q25) bottom.push_back(outcomes[i]);
    if (samples[i].natural_similarity >= out.q75) top.push_back(outcomes[i]);
  }
  out.bottom_n = bottom.size();
  out.top_n = top.size();
  const auto score = [&](const std::vector<AttackOutcome>& group, const char* name) -> std::optional<SuccessTable> {
    try {
      if (!group.empty()) return success_rates(group);
    } catch (const DegenerateInputError&) {
    }
    out.notes.push_back(std::string(name) + " quartile has no scorable samples");
    return std::nullopt;
  };
  out.bottom = score(bottom, "bottom");
  out.top = score(top, "top");
  return out;
}

RankingCurve ranking_similarity_curve(const Matcher& matcher, const PoolingPolicy& pooling,
                                      const std::vector<int>& rank_points) {
  const Corpus& corpus = matcher.corpus();
  if (corpus.submissions.empty()) throw DegenerateInputError("corpus " + corpus.label + " has no submissions");
  std::vector<std::vector<double>> columns(rank_points.size());
  for (const auto& pid : corpus.submissions) {
    const auto ranking = matcher.rank_reviewers(corpus.paper(pid), matcher.default_pool(), pooling);
    for (std::size_t i = 0; i < rank_points.size(); ++i) {
      const int r = rank_points[i];
      if (r >= 1 && static_cast<std::size_t>(r) <= ranking.entries.size()) {
        columns[i].push_back(ranking.entries[static_cast<std::size_t>(r) - 1].similarity);
      }
    }
  }
  RankingCurve out;
  for (std::size_t i = 0; i < rank_points.size(); ++i) {
    const auto& col = columns[i];
    if (col.empty()) {
      out.notes.push_back("rank " + std::to_string(rank_points[i]) + " is outside the pool of " +
                          std::to_string(matcher.default_pool().size()) + " reviewers");
      continue;
    }
    double sum = 0.0;
    for (const double x : col) sum += x;
    const double n = static_cast<double>(col.size());
    const double mean = sum / n;
    out.points.push_back({rank_points[i], mean, sample_sd(col, mean) / std::sqrt(n), col.size()});
  }
  return out;
}

void write_success_csv(std::ostream& out, const std::vector<std::pair<int, SuccessTable>>& rows) {
  out << "rank,k,rate,se,mean,ci_lo,ci_hi,n\n";
  for (const auto& [rank, t] : rows) {
    for (const auto& r : t.rates) {
      out << rank << ',' << r.k << ',' << fmt(r.rate) << ',' << fmt(r.se) << ',' << fmt(t.mean_rank) << ','
          << fmt(t.ci_lo) << ',' << fmt(t.ci_hi) << ',' << t.n << '\n';
    }
  }
}

void write_outcomes_jsonl(std::ostream& out, std::span<const AttackOutcome> outcomes) {
  for (const auto& o : outcomes) out << to_json(o).dump() << '\n';
}

json to_json(const SuccessTable& t) {
  json rates = json::array();
  for (const auto& r : t.rates) rates.push_back({{"k", r.k}, {"rate", r.rate}, {"se", r.se}});
  return {{"rates", std::move(rates)}, {"mean_rank", t.mean_rank}, {"ci_lo", t.ci_lo},
          {"ci_hi", t.ci_hi},          {"n", t.n},                 {"failed", t.failed}};
}

json to_json(const EvalSample& s) {
  return {{"paper_id", s.paper_id},
          {"reviewer_id", s.reviewer_id},
          {"natural_rank", s.natural_rank},
          {"natural_similarity", s.natural_similarity}};
}

}  // namespace matchprobe
