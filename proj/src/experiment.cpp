#include "srclink/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "srclink/error.hpp"

namespace srclink {

std::string_view to_string(Reduction r) {
  return r == Reduction::threshold_only ? "threshold_only" : "tsvd";
}

Reduction parse_reduction(std::string_view s) {
  if (s == "threshold_only" || s == "threshold") return Reduction::threshold_only;
  if (s == "tsvd") return Reduction::tsvd;
  throw ContractViolation("unknown reduction: " + std::string(s));
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok:
      return "ok";
    case RunStatus::cca_failed:
      return "cca_failed";
    case RunStatus::error:
      return "error";
  }
  return "?";
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ValidationError("invalid experiment config: " + msg, {}); };
  if (c.reduction == Reduction::tsvd && !c.tsvd_k) fail("reduction tsvd requires tsvd_k");
  if (c.reduction != Reduction::tsvd && c.tsvd_k) fail("tsvd_k given without reduction tsvd");
  if (c.tsvd_k && *c.tsvd_k < 1) fail("tsvd_k must be >= 1");
  if (c.cca_dims) {
    if (c.reduction != Reduction::tsvd) fail("cca_dims requires reduction tsvd");
    if (*c.cca_dims < 1 || *c.cca_dims > *c.tsvd_k) fail("cca_dims must be in [1, tsvd_k]");
  }
  if (!(c.max_df > 0.0 && c.max_df <= 1.0)) fail("max_df must be in (0, 1]");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) fail("train_fraction must be in (0, 1)");
  if (!(c.cca_epsilon > 0.0)) fail("cca_epsilon must be > 0");
  if (c.top_k < 1) fail("top_k must be >= 1");
}

std::string experiment_id(const ExperimentConfig& c) {
  std::string id(to_string(c.scheme));
  if (c.reduction == Reduction::threshold_only) {
    id += "_threshold";
  } else {
    id += "_tsvd" + std::to_string(c.tsvd_k.value_or(0));
  }
  if (c.cca_dims) id += "_cca" + std::to_string(*c.cca_dims);
  return id;
}

EvalSummary summarize(const ExperimentConfig& config, std::span<const RankedResult> rankings,
                      std::size_t pool_size) {
  std::vector<std::size_t> ranks;
  ranks.reserve(rankings.size());
  for (const auto& r : rankings) ranks.push_back(r.true_rank);

  EvalSummary s;
  s.config = config;
  s.n_queries = ranks.size();
  s.pool_size = pool_size;
  const RankSummary q = median_and_iqr(ranks);
  EvalMetrics m;
  m.median_rank = q.median;
  m.iqr_low = q.q1;
  m.iqr_high = q.q3;
  m.recall_at_1 = recall_at_k(ranks, 1);
  m.recall_at_50 = recall_at_k(ranks, 50);
  m.curve = recall_curve(ranks, pool_size);
  s.metrics = std::move(m);
  return s;
}

// ---- ExperimentContext --------------------------------------------------------------

ExperimentContext::ExperimentContext(CorpusManifest manifest) : manifest_(std::move(manifest)) {
  validate_manifest(manifest_);
  for (std::size_t i = 0; i < manifest_.articles.size(); ++i) article_index_.emplace(manifest_.articles[i].id, i);
  for (std::size_t i = 0; i < manifest_.webpages.size(); ++i) webpage_index_.emplace(manifest_.webpages[i].id, i);
}

ExperimentContext ExperimentContext::load(const std::filesystem::path& manifest_dir) {
  return ExperimentContext(read_manifest(manifest_dir));
}

ExperimentContext::VocabKey ExperimentContext::vocab_key(const ExperimentConfig& c) {
  return {c.train_fraction, c.seed, c.max_df, c.idf_variant};
}

ExperimentContext::VectorKey ExperimentContext::vector_key(const ExperimentConfig& c) {
  return {vocab_key(c), c.scheme};
}

const ExperimentContext::Split& ExperimentContext::split(double train_fraction, std::uint64_t seed) {
  const SplitKey key{train_fraction, seed};
  if (auto it = splits_.find(key); it != splits_.end()) return it->second;
  const auto partition = split_links(manifest_.links, train_fraction, seed);
  Split s;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    (partition[i] == Partition::train ? s.train : s.test).push_back(i);
  }
  for (std::size_t i : s.train) {
    s.train_webpages.push_back(manifest_.webpages[webpage_index_.at(manifest_.links[i].webpage_id)]);
  }
  return splits_.emplace(key, std::move(s)).first->second;
}

const Vocabulary& ExperimentContext::vocabulary(const ExperimentConfig& c) {
  const VocabKey key = vocab_key(c);
  if (auto it = vocabularies_.find(key); it != vocabularies_.end()) return it->second;
  const Split& s = split(c.train_fraction, c.seed);
  return vocabularies_
      .emplace(key, build_vocabulary(manifest_.articles, s.train_webpages, c.max_df, c.idf_variant))
      .first->second;
}

const std::vector<SparseVector>& ExperimentContext::article_vectors(const ExperimentConfig& c) {
  const VectorKey key = vector_key(c);
  if (auto it = article_vectors_.find(key); it != article_vectors_.end()) return it->second;
  return article_vectors_.emplace(key, vectorize_corpus(manifest_.articles, vocabulary(c), c.scheme))
      .first->second;
}

const std::vector<SparseVector>& ExperimentContext::webpage_vectors(const ExperimentConfig& c) {
  const VectorKey key = vector_key(c);
  if (auto it = webpage_vectors_.find(key); it != webpage_vectors_.end()) return it->second;
  return webpage_vectors_.emplace(key, vectorize_corpus(manifest_.webpages, vocabulary(c), c.scheme))
      .first->second;
}

const TsvdModel& ExperimentContext::tsvd(const ExperimentConfig& c) {
  const TsvdKey key{vector_key(c), c.tsvd_k.value_or(0), c.tsvd_n_iter, c.tsvd_oversampling};
  if (auto it = tsvd_models_.find(key); it != tsvd_models_.end()) return it->second;
  const Split& s = split(c.train_fraction, c.seed);
  const auto& articles = article_vectors(c);
  const auto& webpages = webpage_vectors(c);
  std::vector<SparseVector> stack;
  stack.reserve(2 * s.train.size());
  for (std::size_t i : s.train) stack.push_back(articles[article_index_.at(manifest_.links[i].article_id)]);
  for (std::size_t i : s.train) stack.push_back(webpages[webpage_index_.at(manifest_.links[i].webpage_id)]);
  TsvdOptions options;
  options.k = c.tsvd_k.value_or(0);
  options.seed = c.seed;
  options.n_iter = c.tsvd_n_iter;
  options.oversampling = c.tsvd_oversampling;
  return tsvd_models_.emplace(key, fit_tsvd(stack, options)).first->second;
}

// ---- running -------------------------------------------------------------------------

namespace {

template <typename Fn>
std::vector<SparseVector> gather(const std::vector<SparseVector>& all, std::span<const std::string> ids,
                                 Fn index_of) {
  std::vector<SparseVector> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(all[index_of(id)]);
  return out;
}

}  // namespace

ExperimentOutput run_experiment_detailed(ExperimentContext& context, const ExperimentConfig& config,
                                         const RunOptions& options) {
  validate(config);
  const CorpusManifest& m = context.manifest();
  const auto& s = context.split(config.train_fraction, config.seed);

  std::vector<std::string> pool_ids;
  std::vector<std::string> query_ids;
  std::vector<std::string> query_truth;
  for (std::size_t i : s.test) {
    pool_ids.push_back(m.links[i].article_id);
    query_ids.push_back(m.links[i].webpage_id);
    query_truth.push_back(m.links[i].article_id);
  }
  pool_ids.insert(pool_ids.end(), m.distractors.begin(), m.distractors.end());
  std::sort(pool_ids.begin(), pool_ids.end());

  std::vector<std::string> train_article_ids;
  std::vector<std::string> train_webpage_ids;
  for (std::size_t i : s.train) {
    train_article_ids.push_back(m.links[i].article_id);
    train_webpage_ids.push_back(m.links[i].webpage_id);
  }

  auto article_pos = [&](const std::string& id) { return context.article_index(id); };
  auto webpage_pos = [&](const std::string& id) { return context.webpage_index(id); };
  const auto& article_vecs = context.article_vectors(config);
  const auto& webpage_vecs = context.webpage_vectors(config);
  const std::vector<SparseVector> pool_sparse = gather(article_vecs, pool_ids, article_pos);
  const std::vector<SparseVector> query_sparse = gather(webpage_vecs, query_ids, webpage_pos);

  const std::size_t pool_size = pool_ids.size();
  std::vector<Query> queries;
  queries.reserve(query_ids.size());
  std::optional<CandidatePool> pool;
  const std::string tag = experiment_id(config);

  if (config.reduction == Reduction::threshold_only) {
    for (std::size_t q = 0; q < query_ids.size(); ++q) {
      queries.push_back({query_ids[q], query_truth[q], query_sparse[q]});
    }
    pool.emplace(pool_ids, pool_sparse, tag);
  } else {
    const TsvdModel& model = context.tsvd(config);
    EmbeddingMatrix pool_rows = project(model, pool_sparse);
    EmbeddingMatrix query_rows = project(model, query_sparse);
    if (config.cca_dims) {
      const EmbeddingMatrix train_webpages =
          project(model, gather(webpage_vecs, train_webpage_ids, webpage_pos));
      const EmbeddingMatrix train_articles =
          project(model, gather(article_vecs, train_article_ids, article_pos));
      CcaModel cca;
      try {
        cca = fit_cca(train_webpages, train_articles, *config.cca_dims, config.cca_epsilon);
      } catch (const CcaNonConvergence& e) {
        ExperimentOutput failed;
        failed.summary.config = config;
        failed.summary.status = RunStatus::cca_failed;
        failed.summary.n_queries = query_ids.size();
        failed.summary.pool_size = pool_size;
        failed.summary.message = e.what();
        return failed;
      }
      pool_rows = project_side(cca, Side::article, pool_rows);
      query_rows = project_side(cca, Side::webpage, query_rows);
    }
    for (std::size_t q = 0; q < query_ids.size(); ++q) {
      queries.push_back({query_ids[q], query_truth[q],
                         Eigen::VectorXd(query_rows.row(static_cast<Eigen::Index>(q)).transpose())});
    }
    pool.emplace(pool_ids, std::move(pool_rows), tag);
  }

  ExperimentOutput out;
  out.rankings = rank_all(queries, *pool, config.top_k, options.threads);
  out.summary = summarize(config, out.rankings, pool_size);
  return out;
}

EvalSummary run_experiment(ExperimentContext& context, const ExperimentConfig& config,
                           const RunOptions& options) {
  return run_experiment_detailed(context, config, options).summary;
}

EvalSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentContext context = ExperimentContext::load(config.manifest_path);
  return run_experiment(context, config, options);
}

namespace {

EvalSummary failed_row(const ExperimentConfig& config, const std::exception& e) {
  EvalSummary s;
  s.config = config;
  s.status = RunStatus::error;
  s.message = e.what();
  return s;
}

EvalSummary run_guarded(ExperimentContext& context, const ExperimentConfig& config,
                        const RunOptions& options) {
  try {
    return run_experiment(context, config, options);
  } catch (const Error& e) {
    return failed_row(config, e);
  } catch (const ContractViolation& e) {
    return failed_row(config, e);
  }
}

}  // namespace

std::vector<EvalSummary> run_grid(ExperimentContext& context, std::span<const ExperimentConfig> configs,
                                  const RunOptions& options) {
  if (configs.empty()) throw ContractViolation("run_grid needs at least one config");
  std::vector<EvalSummary> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) rows.push_back(run_guarded(context, c, options));
  return rows;
}

std::vector<EvalSummary> run_grid(std::span<const ExperimentConfig> configs, const RunOptions& options) {
  if (configs.empty()) throw ContractViolation("run_grid needs at least one config");
  std::map<std::filesystem::path, std::unique_ptr<ExperimentContext>> contexts;
  std::vector<EvalSummary> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) {
    auto& ctx = contexts[c.manifest_path];
    if (!ctx) {
      try {
        ctx = std::make_unique<ExperimentContext>(ExperimentContext::load(c.manifest_path));
      } catch (const Error& e) {
        rows.push_back(failed_row(c, e));
        contexts.erase(c.manifest_path);
        continue;
      }
    }
    rows.push_back(run_guarded(*ctx, c, options));
  }
  return rows;
}

std::vector<ExperimentConfig> phase1_grid(const ExperimentConfig& base,
                                          std::span<const std::size_t> tsvd_ks) {
  const WeightingScheme schemes[] = {WeightingScheme::binary, WeightingScheme::tf, WeightingScheme::tfidf};
  std::vector<ExperimentConfig> grid;
  for (auto scheme : schemes) {
    ExperimentConfig c = base;
    c.scheme = scheme;
    c.reduction = Reduction::threshold_only;
    c.tsvd_k.reset();
    c.cca_dims.reset();
    grid.push_back(c);
  }
  for (std::size_t k : tsvd_ks) {
    for (auto scheme : schemes) {
      ExperimentConfig c = base;
      c.scheme = scheme;
      c.reduction = Reduction::tsvd;
      c.tsvd_k = k;
      c.cca_dims.reset();
      grid.push_back(c);
    }
  }
  return grid;
}

std::vector<ExperimentConfig> phase2_grid(const ExperimentConfig& base,
                                          std::span<const std::size_t> tsvd_ks,
                                          std::span<const std::size_t> cca_dims) {
  std::vector<ExperimentConfig> grid;
  for (std::size_t k : tsvd_ks) {
    ExperimentConfig c = base;
    c.scheme = WeightingScheme::tfidf;
    c.reduction = Reduction::tsvd;
    c.tsvd_k = k;
    c.cca_dims.reset();
    grid.push_back(c);
    for (std::size_t d : cca_dims) {
      if (d > k) continue;
      c.cca_dims = d;
      grid.push_back(c);
    }
  }
  return grid;
}

// ---- reports ------------------------------------------------------------------------

std::string format_number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw ContractViolation("format_number failed");
  return std::string(buf, end);
}

void write_grid_csv(std::ostream& out, std::span<const EvalSummary> summaries) {
  out << kGridCsvHeader << '\n';
  for (const auto& s : summaries) {
    const auto& c = s.config;
    out << to_string(c.scheme) << ',' << to_string(c.reduction) << ','
        << (c.tsvd_k ? std::to_string(*c.tsvd_k) : "") << ','
        << (c.cca_dims ? std::to_string(*c.cca_dims) : "") << ',' << to_string(s.status) << ','
        << s.n_queries << ',';
    if (s.metrics) {
      const auto& m = *s.metrics;
      out << format_number(m.median_rank) << ',' << format_number(m.iqr_low) << ','
          << format_number(m.iqr_high) << ',' << format_number(m.recall_at_1) << ','
          << format_number(m.recall_at_50);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "k,recall\n";
  for (const auto& p : curve) out << p.k << ',' << format_number(p.recall) << '\n';
}

std::string summary_json(const EvalSummary& s) {
  const auto& c = s.config;
  nlohmann::ordered_json config = {
      {"scheme", to_string(c.scheme)},
      {"reduction", to_string(c.reduction)},
      {"tsvd_k", c.tsvd_k ? nlohmann::ordered_json(*c.tsvd_k) : nlohmann::ordered_json()},
      {"cca_dims", c.cca_dims ? nlohmann::ordered_json(*c.cca_dims) : nlohmann::ordered_json()},
      {"max_df", c.max_df},
      {"train_fraction", c.train_fraction},
      {"seed", c.seed},
      {"idf_variant", to_string(c.idf_variant)},
      {"tsvd_n_iter", c.tsvd_n_iter},
      {"tsvd_oversampling", c.tsvd_oversampling},
      {"cca_epsilon", c.cca_epsilon},
      {"top_k", c.top_k},
  };
  nlohmann::ordered_json j = {
      {"id", experiment_id(c)},   {"config", config},         {"status", to_string(s.status)},
      {"n_queries", s.n_queries}, {"pool_size", s.pool_size},
  };
  if (s.metrics) {
    j["median_rank"] = s.metrics->median_rank;
    j["iqr"] = {s.metrics->iqr_low, s.metrics->iqr_high};
    j["recall_at_1"] = s.metrics->recall_at_1;
    j["recall_at_50"] = s.metrics->recall_at_50;
  }
  if (!s.message.empty()) j["message"] = s.message;
  return j.dump(2);
}

void write_grid_report(const std::filesystem::path& dir, std::span<const EvalSummary> summaries) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "grid.csv");
    if (!out) throw IoError("cannot write " + (dir / "grid.csv").string());
    write_grid_csv(out, summaries);
  }
  std::set<std::string> used;
  for (const auto& s : summaries) {
    if (!s.metrics) continue;
    std::string id = experiment_id(s.config);
    for (int n = 2; !used.insert(id).second; ++n) id = experiment_id(s.config) + "_" + std::to_string(n);
    std::ofstream out(dir / ("curve_" + id + ".csv"));
    if (!out) throw IoError("cannot write curve for " + id);
    write_curve_csv(out, s.metrics->curve);
  }
}

}  // namespace srclink
