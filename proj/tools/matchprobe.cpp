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

// matchprobe command-line front end.

#include <CLI11.hpp>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "matchprobe/corpus.hpp"
#include "matchprobe/curation.hpp"
#include "matchprobe/embedder.hpp"
#include "matchprobe/error.hpp"
#include "matchprobe/evalharness.hpp"
#include "matchprobe/matcher.hpp"
#include "matchprobe/rewrite.hpp"
#include "matchprobe/service.hpp"
#include "matchprobe/simd/kernels.hpp"
#include "matchprobe/synth.hpp"
#include "matchprobe/text_attack.hpp"

namespace fs = std::filesystem;
using namespace matchprobe;
using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct ProviderOptions {
  std::string embedder = "reference";
  std::size_t dim = kDefaultDimension;
  std::string embed_url = env_or("MATCHPROBE_EMBED_URL");
  std::string cache;
  std::string rewriter = "stub";
  std::string rewrite_url = env_or("MATCHPROBE_REWRITE_URL");
  std::string rewrite_key = env_or("MATCHPROBE_REWRITE_KEY");

  void add(CLI::App* app) {
    app->add_option("--embedder", embedder, "reference | remote")->check(CLI::IsMember({"reference", "remote"}));
    app->add_option("--dim", dim, "embedding dimension");
    app->add_option("--embed-url", embed_url, "embedding service (MATCHPROBE_EMBED_URL)");
    app->add_option("--cache", cache, "persistent embedding cache file");
    app->add_option("--rewriter", rewriter, "stub | remote")->check(CLI::IsMember({"stub", "remote"}));
    app->add_option("--rewrite-url", rewrite_url, "rewrite service (MATCHPROBE_REWRITE_URL)");
  }

  std::shared_ptr<Embedder> make_embedder() const {
    EmbeddingProviderConfig cfg;
    cfg.dimension = dim;
    if (embedder == "remote") {
      cfg.kind = EmbeddingProviderConfig::Kind::remote;
      if (!embed_url.empty()) cfg.remote_url = embed_url;
    }
    std::shared_ptr<EmbeddingCache> c;
    if (!cache.empty()) c = std::make_shared<EmbeddingCache>(cache);
    return std::make_shared<Embedder>(make_provider(cfg), c);
  }

  std::shared_ptr<const RewriteProvider> make_rewriter() const {
    if (rewriter == "remote") {
      if (rewrite_url.empty()) throw ContractError("remote rewriter needs --rewrite-url or MATCHPROBE_REWRITE_URL");
      return std::make_shared<RemoteRewriter>(rewrite_url, rewrite_key);
    }
    return std::make_shared<StubRewriter>();
  }
};

// The matcher refers to the corpus and embedder; Loaded keeps all three alive.
struct Loaded {
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<Corpus> corpus;
  std::shared_ptr<Matcher> matcher;
};

Loaded load(const std::string& path, const std::shared_ptr<Embedder>& embedder, std::size_t archive_limit) {
  Loaded l{embedder, std::make_shared<Corpus>(load_corpus(path)), nullptr};
  l.matcher = std::make_shared<Matcher>(*l.corpus, *l.embedder, archive_limit);
  return l;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

struct EvalOptions {
  std::string corpus;
  int rank = 101;
  std::size_t n = 300;
  std::uint64_t seed = 7;
  std::string budget = "N=5,M=2,K=5";
  std::string pooling = "mean";
  std::size_t keep = 1;
  bool no_curation = false;
  std::size_t min_publications = 0;
  std::string proxy;
  bool zero_floor = false;
  unsigned threads = 1;
  std::size_t archive_limit = 10;
  std::string out = "report";

  void add(CLI::App* app, bool with_out = true) {
    app->add_option("--corpus", corpus, "corpus file")->required();
    app->add_option("--rank", rank, "natural rank of the sampled pairs");
    app->add_option("--n", n, "number of sampled pairs");
    app->add_option("--seed", seed, "sampling and tie-breaking seed");
    app->add_option("--budget", budget, "N=..,M=..,K=..[,delta=..]");
    app->add_option("--pooling", pooling, "mean | max | pNN");
    app->add_option("--keep", keep, "papers kept by archive curation");
    app->add_flag("--no-curation", no_curation, "leave the colluder's archive untouched");
    app->add_option("--min-publications", min_publications, "eligibility: reviewer publication count");
    app->add_option("--early-stop-proxy", proxy, "proxy corpus for early stopping");
    app->add_flag("--zero-floor", zero_floor, "zero similarities ranked beyond 100");
    app->add_option("--threads", threads, "parallel attack runs");
    app->add_option("--archive-limit", archive_limit, "default archive length");
    if (with_out) app->add_option("--out", out, "report directory");
  }

  EvalConfig config() const {
    EvalConfig c;
    c.pooling = PoolingPolicy::parse(pooling);
    c.budget = AttackBudget::parse(budget);
    if (const auto p = c.budget.problems(); !p.empty()) throw BudgetError(p.front());
    c.keep_k = keep;
    c.curate = !no_curation;
    c.seed = seed;
    c.zero_floor = zero_floor;
    c.threads = threads;
    return c;
  }
};

json table_row(int rank, const SuccessTable& t) {
  json j = to_json(t);
  j["rank"] = rank;
  return j;
}

int cmd_ingest(const std::string& papers, const std::string& reviewers, const std::string& label,
               const std::string& out) {
  const Corpus c = ingest_corpus(papers, reviewers, label);
  for (const auto& w : c.ingest_warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& d : c.drop_report) std::cerr << "dropped " << d.reviewer_id << ": " << d.reason << '\n';
  int errors = 0;
  for (const auto& issue : validate_corpus(c)) {
    const bool err = issue.severity == ValidationIssue::Severity::error;
    errors += err;
    std::cerr << (err ? "error: " : "warning: ") << issue.kind << " " << issue.subject << ": " << issue.detail << '\n';
  }
  save_corpus(c, out);
  std::cout << json{{"label", c.label},
                    {"papers", c.papers.size()},
                    {"reviewers", c.reviewers.size()},
                    {"submissions", c.submissions.size()},
                    {"dropped", c.drop_report.size()},
                    {"out", out}}
                   .dump(2)
            << '\n';
  return errors ? 1 : 0;
}

void write_eval_reports(const fs::path& dir, int rank, const std::vector<EvalSample>& population,
                        const std::vector<EvalSample>& samples, const EvalRun& run, const EvalConfig& cfg,
                        const std::string& label) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "outcomes.jsonl", std::ios::binary);
    write_outcomes_jsonl(out, run.outcomes);
  }
  {
    std::ofstream out(dir / "success.csv", std::ios::binary);
    write_success_csv(out, {{rank, run.table}});
  }
  {
    std::ofstream out(dir / "samples.jsonl", std::ios::binary);
    for (const auto& s : samples) out << to_json(s).dump() << '\n';
  }
  const auto q = quartile_stratify(population, samples, run.outcomes);
  json quart = {{"q25", q.q25}, {"q75", q.q75}, {"bottom_n", q.bottom_n}, {"top_n", q.top_n}, {"notes", q.notes}};
  if (q.bottom) quart["bottom"] = to_json(*q.bottom);
  if (q.top) quart["top"] = to_json(*q.top);
  const json report = {{"corpus", label},
                       {"rank", rank},
                       {"pooling", cfg.pooling.name()},
                       {"budget", to_json(cfg.budget)},
                       {"keep_k", cfg.keep_k},
                       {"curation", cfg.curate},
                       {"seed", cfg.seed},
                       {"zero_floor", cfg.zero_floor},
                       {"eligible", population.size()},
                       {"success", to_json(run.table)},
                       {"quartiles", quart}};
  write_file(dir / "report.json", report.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matchprobe: reviewer-assignment matching and manipulation toolkit"};
  app.require_subcommand(1);
  ProviderOptions prov;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "build a corpus file from line-delimited JSON records");
  std::string papers, reviewers, label, out;
  ingest->add_option("--papers", papers)->required();
  ingest->add_option("--reviewers", reviewers)->required();
  ingest->add_option("--label", label)->required();
  ingest->add_option("--out", out)->required();

  // rank
  auto* rank = app.add_subcommand("rank", "rank every reviewer for one paper (CSV)");
  std::string corpus_path, paper_id, reviewer_id, pooling = "mean";
  bool zero_floor = false;
  std::size_t archive_limit = 10;
  rank->add_option("--corpus", corpus_path)->required();
  rank->add_option("--paper", paper_id)->required();
  rank->add_option("--pooling", pooling);
  rank->add_flag("--zero-floor", zero_floor);
  rank->add_option("--archive-limit", archive_limit);
  prov.add(rank);

  // curate
  auto* curate = app.add_subcommand("curate", "adversarial archive of a reviewer for a paper");
  std::size_t keep = 1;
  std::uint64_t seed = 0;
  curate->add_option("--corpus", corpus_path)->required();
  curate->add_option("--paper", paper_id)->required();
  curate->add_option("--reviewer", reviewer_id)->required();
  curate->add_option("--keep", keep);
  curate->add_option("--seed", seed);
  curate->add_option("--pooling", pooling);
  curate->add_option("--archive-limit", archive_limit);
  prov.add(curate);

  // attack
  auto* attack = app.add_subcommand("attack", "run the automatic attack on one pair");
  std::string budget = "N=5,M=2,K=5", mode = "auto", proxy_path;
  attack->add_option("--corpus", corpus_path)->required();
  attack->add_option("--paper", paper_id)->required();
  attack->add_option("--reviewer", reviewer_id)->required();
  attack->add_option("--budget", budget);
  attack->add_option("--mode", mode)->check(CLI::IsMember({"auto", "automatic", "human"}));
  attack->add_option("--keep", keep);
  attack->add_option("--seed", seed);
  attack->add_option("--pooling", pooling);
  attack->add_option("--early-stop-proxy", proxy_path);
  attack->add_flag("--zero-floor", zero_floor);
  attack->add_option("--archive-limit", archive_limit);
  prov.add(attack);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "sample pairs at a natural rank and attack each");
  EvalOptions ev;
  ev.add(evaluate_cmd);
  prov.add(evaluate_cmd);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "budget, archive-length and pooling sweeps");
  EvalOptions sw;
  sw.add(sweep);
  std::string n_grid, m_grid, k_grid = "5", keep_grid;
  bool compare_pooling = false, curation_only = false;
  sweep->add_option("--n-grid", n_grid, "IncludeThemes versions, e.g. 0,1,3,5,10");
  sweep->add_option("--m-grid", m_grid, "keyword batches");
  sweep->add_option("--k-grid", k_grid, "keywords per batch");
  sweep->add_option("--keep-grid", keep_grid, "archive lengths, e.g. 1,2,5,10");
  sweep->add_flag("--curation-only", curation_only, "archive-length sweep without text attack");
  sweep->add_flag("--compare-pooling", compare_pooling, "mean vs max pooling without curation");
  prov.add(sweep);

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Spearman correlation of current and proxy-pool ranks");
  EvalOptions co;
  co.add(correlate);
  std::string corr_ranks;
  correlate->add_option("--proxy", proxy_path)->required();
  correlate->add_option("--ranks", corr_ranks, "natural-rank groups, e.g. 101,501");
  prov.add(correlate);

  // curve
  auto* curve = app.add_subcommand("curve", "mean similarity held at each ranking position (CSV)");
  std::string ranks = "1,5,20,101,501,1001,7900";
  curve->add_option("--corpus", corpus_path)->required();
  curve->add_option("--ranks", ranks);
  curve->add_option("--pooling", pooling);
  curve->add_option("--archive-limit", archive_limit);
  prov.add(curve);

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP session API for human-in-the-loop attacks");
  std::vector<std::string> corpora;
  std::vector<std::string> proxies;
  std::string bind = env_or("MATCHPROBE_BIND", "127.0.0.1:8080"), log_path, token = env_or("MATCHPROBE_TOKEN");
  serve->add_option("--corpus", corpora, "corpus file (repeatable)")->required();
  serve->add_option("--proxy", proxies, "proxy corpus file (repeatable)");
  serve->add_option("--bind", bind, "host:port (MATCHPROBE_BIND)");
  serve->add_option("--log", log_path, "append-only session log");
  serve->add_option("--token", token, "static API token (MATCHPROBE_TOKEN)");
  serve->add_option("--archive-limit", archive_limit);
  prov.add(serve);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus and its proxy edition");
  SynthConfig sc;
  std::string proxy_out;
  synth->add_option("--out", out)->required();
  synth->add_option("--proxy-out", proxy_out);
  synth->add_option("--seed", sc.seed);
  synth->add_option("--reviewers", sc.reviewers);
  synth->add_option("--submissions", sc.submissions);
  synth->add_option("--topics", sc.topics);
  synth->add_option("--topic-share", sc.topic_share);
  synth->add_option("--label", sc.label);

  auto* info = app.add_subcommand("info", "build and runtime details");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(papers, reviewers, label, out);

    if (*synth) {
      save_corpus(synth_corpus(sc), out);
      if (!proxy_out.empty()) save_corpus(synth_proxy_corpus(sc), proxy_out);
      return 0;
    }

    if (*info) {
      std::cout << json{{"simd", std::string(simd::isa_name(simd::active().isa))},
                        {"prompt_templates", prompt_template_ids()},
                        {"schema_version", kSchemaVersion}}
                       .dump(2)
                << '\n';
      return 0;
    }

    const auto embedder = prov.make_embedder();
    const auto pooling_policy = PoolingPolicy::parse(pooling);

    if (*rank) {
      const auto l = load(corpus_path, embedder, archive_limit);
      const auto ranking =
          l.matcher->rank_reviewers(l.corpus->paper(paper_id), l.matcher->default_pool(), pooling_policy, zero_floor);
      std::cout << "reviewer_id,similarity,rank\n";
      for (const auto& e : ranking.entries) {
        char sim[32];
        std::snprintf(sim, sizeof sim, "%.9f", e.similarity);
        std::cout << e.reviewer_id << ',' << sim << ',' << e.rank << '\n';
      }
      return 0;
    }

    if (*curate) {
      const auto l = load(corpus_path, embedder, archive_limit);
      std::vector<std::string> warnings;
      const Archive adv = apply_curation({reviewer_id, paper_id, keep, seed, true}, *l.matcher, &warnings);
      const auto& paper = l.corpus->paper(paper_id);
      json papers_json = json::array();
      const auto cos = l.matcher->archive_cosines(l.matcher->embed_paper(paper), adv);
      for (std::size_t i = 0; i < adv.size(); ++i) {
        papers_json.push_back(
            {{"id", adv.paper_ids[i]}, {"title", l.corpus->paper(adv.paper_ids[i]).title}, {"cosine", cos[i]}});
      }
      std::cout << json{{"reviewer_id", reviewer_id},
                        {"paper_id", paper_id},
                        {"keep_k", keep},
                        {"seed", seed},
                        {"archive", papers_json},
                        {"natural_rank", l.matcher->natural_rank(paper, reviewer_id, pooling_policy)},
                        {"curated_rank",
                         curation_only_ranking(paper, reviewer_id, *l.matcher, pooling_policy, keep, seed)},
                        {"warnings", warnings}}
                       .dump(2)
                << '\n';
      return 0;
    }

    if (*attack) {
      if (parse_attack_mode(mode) == AttackMode::human_in_the_loop) {
        std::cerr << "human-in-the-loop attacks run through `matchprobe serve`\n";
        return 2;
      }
      const auto l = load(corpus_path, embedder, archive_limit);
      const auto rewriter = prov.make_rewriter();
      AttackBudget b = AttackBudget::parse(budget);
      if (const auto p = b.problems(); !p.empty()) throw BudgetError(p.front());
      std::optional<Loaded> proxy;
      std::optional<EarlyStopping> es;
      if (!proxy_path.empty()) {
        proxy = load(proxy_path, embedder, archive_limit);
        es = EarlyStopping{proxy->matcher.get(), pooling_policy};
      }
      const AttackContext ctx{*l.matcher, *rewriter, pooling_policy, b, {}, es ? &*es : nullptr, nullptr};
      AttackRequest req{paper_id, reviewer_id, {reviewer_id, paper_id, keep, seed, true}, zero_floor};
      const auto outcome = run_attack(req, ctx);
      std::cout << to_json(outcome).dump(2) << '\n';
      return outcome.failed ? 1 : 0;
    }

    if (*evaluate_cmd) {
      const auto l = load(ev.corpus, embedder, ev.archive_limit);
      const auto rewriter = prov.make_rewriter();
      EvalConfig cfg = ev.config();
      std::optional<Loaded> proxy;
      std::optional<EarlyStopping> es;
      if (!ev.proxy.empty()) {
        proxy = load(ev.proxy, embedder, ev.archive_limit);
        es = EarlyStopping{proxy->matcher.get(), cfg.pooling};
        cfg.early_stopping = &*es;
      }
      const auto population = eligible_pairs(*l.matcher, ev.rank, cfg.pooling, {ev.min_publications});
      const auto samples = sample_from(population, ev.n, ev.seed);
      const auto run = evaluate(*l.matcher, *rewriter, samples, cfg);
      write_eval_reports(ev.out, ev.rank, population, samples, run, cfg, l.corpus->label);
      std::cout << table_row(ev.rank, run.table).dump(2) << '\n';
      return 0;
    }

    if (*sweep) {
      const auto l = load(sw.corpus, embedder, sw.archive_limit);
      const auto rewriter = prov.make_rewriter();
      const EvalConfig cfg = sw.config();
      fs::create_directories(sw.out);
      json report = json::object();
      std::vector<std::pair<int, SuccessTable>> rows;
      std::ofstream csv(fs::path(sw.out) / "sweep.csv", std::ios::binary);
      csv << "sweep,setting,k,rate,se,mean,ci_lo,ci_hi,n\n";
      const auto emit = [&](const std::string& sweep_name, const std::string& setting, const SuccessTable& t) {
        for (const auto& r : t.rates) {
          char line[256];
          std::snprintf(line, sizeof line, "%s,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%zu\n", sweep_name.c_str(),
                        setting.c_str(), r.k, r.rate, r.se, t.mean_rank, t.ci_lo, t.ci_hi, t.n);
          csv << line;
        }
      };
      const auto samples =
          sample_eval_pairs(*l.matcher, sw.rank, sw.n, sw.seed, cfg.pooling, {sw.min_publications});
      if (!n_grid.empty() || !m_grid.empty()) {
        std::vector<std::pair<int, int>> mk;
        for (const int m : parse_int_list(m_grid)) {
          for (const int k : parse_int_list(k_grid)) mk.emplace_back(m, k);
        }
        json cells = json::array();
        for (const auto& cell : budget_sweep(*l.matcher, *rewriter, samples, parse_int_list(n_grid), mk, cfg)) {
          const std::string setting = "N=" + std::to_string(cell.N) + " M=" + std::to_string(cell.M) +
                                      " K=" + std::to_string(cell.K);
          json j = {{"axis", cell.axis}, {"N", cell.N}, {"M", cell.M}, {"K", cell.K}, {"complete", cell.complete},
                    {"error", cell.error}};
          if (cell.table) {
            j["success"] = to_json(*cell.table);
            emit("budget", setting, *cell.table);
          }
          cells.push_back(std::move(j));
        }
        report["budget"] = std::move(cells);
      }
      if (!keep_grid.empty()) {
        std::vector<std::size_t> keeps;
        for (const int k : parse_int_list(keep_grid)) keeps.push_back(static_cast<std::size_t>(k));
        const auto al = archive_length_sweep(*l.matcher, *rewriter, samples, keeps, cfg, !curation_only);
        json alj = {{"excluded", al.excluded}, {"rows", json::array()}};
        for (const auto& row : al.rows) {
          alj["rows"].push_back({{"keep_k", row.keep_k}, {"success", to_json(row.table)}});
          emit("archive_length", "keep=" + std::to_string(row.keep_k), row.table);
        }
        report["archive_length"] = std::move(alj);
      }
      if (compare_pooling) {
        const auto s_mean =
            sample_eval_pairs(*l.matcher, sw.rank, sw.n, sw.seed, PoolingPolicy::mean(), {sw.min_publications});
        const auto s_max =
            sample_eval_pairs(*l.matcher, sw.rank, sw.n, sw.seed, PoolingPolicy::max(), {sw.min_publications});
        const auto pc = pooling_comparison(*l.matcher, *rewriter, s_mean, s_max, cfg);
        report["pooling"] = {{"mean", to_json(pc.mean)}, {"max", to_json(pc.max)}};
        emit("pooling", "mean", pc.mean);
        emit("pooling", "max", pc.max);
      }
      write_file(fs::path(sw.out) / "sweep.json", report.dump(2) + "\n");
      std::cout << report.dump(2) << '\n';
      return 0;
    }

    if (*correlate) {
      const auto l = load(co.corpus, embedder, co.archive_limit);
      const auto proxy = load(proxy_path, embedder, co.archive_limit);
      const auto rewriter = prov.make_rewriter();
      const EvalConfig cfg = co.config();
      std::vector<int> groups = corr_ranks.empty() ? std::vector<int>{co.rank} : parse_int_list(corr_ranks);
      std::vector<AttackOutcome> outcomes;
      for (const int r : groups) {
        const auto samples = sample_eval_pairs(*l.matcher, r, co.n, co.seed, cfg.pooling, {co.min_publications});
        auto run = evaluate(*l.matcher, *rewriter, samples, cfg);
        outcomes.insert(outcomes.end(), run.outcomes.begin(), run.outcomes.end());
      }
      fs::create_directories(co.out);
      std::ofstream csv(fs::path(co.out) / "correlation.csv", std::ios::binary);
      csv << "natural_rank,n,rho,note\n";
      json rows = json::array();
      for (const auto& row : cross_year_correlation(outcomes, *l.matcher, *proxy.matcher, cfg.pooling)) {
        csv << row.natural_rank << ',' << row.n << ',' << (row.rho ? std::to_string(*row.rho) : "") << ",\""
            << row.note << "\"\n";
        rows.push_back({{"natural_rank", row.natural_rank},
                        {"n", row.n},
                        {"rho", row.rho ? json(*row.rho) : json(nullptr)},
                        {"note", row.note}});
      }
      std::cout << rows.dump(2) << '\n';
      return 0;
    }

    if (*curve) {
      const auto l = load(corpus_path, embedder, archive_limit);
      const auto c = ranking_similarity_curve(*l.matcher, pooling_policy, parse_int_list(ranks));
      std::cout << "rank,mean,se,n\n";
      for (const auto& p : c.points) {
        char line[128];
        std::snprintf(line, sizeof line, "%d,%.9f,%.9f,%zu\n", p.rank, p.mean, p.se, p.n);
        std::cout << line;
      }
      for (const auto& note : c.notes) std::cerr << "note: " << note << '\n';
      return 0;
    }

    if (*serve) {
      std::vector<Loaded> keep_alive;
      std::map<std::string, LoadedCorpus> loaded;
      for (const auto* list : {&corpora, &proxies}) {
        for (const auto& path : *list) {
          auto l = load(path, embedder, archive_limit);
          if (loaded.contains(l.corpus->label)) throw ContractError("duplicate corpus label " + l.corpus->label);
          loaded[l.corpus->label] = {l.corpus, l.matcher};
          keep_alive.push_back(std::move(l));
        }
      }
      SessionManager manager(std::move(loaded), prov.make_rewriter(), log_path);
      for (const auto& w : manager.replay_warnings()) std::cerr << "session log: " << w << '\n';
      HttpServer server(manager, token);
      const auto [host, port] = parse_bind(bind);
      std::cerr << "serving " << manager.session_count() << " restored sessions on " << host << ':' << port << '\n';
      return server.listen(host, port) ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
