#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "srclink/align.hpp"
#include "srclink/corpus.hpp"
#include "srclink/decompose.hpp"
#include "srclink/metrics.hpp"
#include "srclink/ranker.hpp"
#include "srclink/vectorspace.hpp"

namespace srclink {

enum class Reduction { threshold_only, tsvd };

std::string_view to_string(Reduction r);
Reduction parse_reduction(std::string_view s);

struct ExperimentConfig {
  WeightingScheme scheme = WeightingScheme::tfidf;
  Reduction reduction = Reduction::threshold_only;
  std::optional<std::size_t> tsvd_k;
  std::optional<std::size_t> cca_dims;
  double max_df = kDefaultMaxDf;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  std::filesystem::path manifest_path;

  IdfVariant idf_variant = IdfVariant::smooth;
  std::size_t tsvd_n_iter = 7;
  std::size_t tsvd_oversampling = 10;
  double cca_epsilon = kDefaultCcaEpsilon;
  std::size_t top_k = kDefaultTopK;
};

// Throws ValidationError when tsvd_k / cca_dims do not fit the reduction.
void validate(const ExperimentConfig& config);

// Short stable name, e.g. "tfidf_threshold", "tfidf_tsvd400_cca200".
std::string experiment_id(const ExperimentConfig& config);

enum class RunStatus { ok, cca_failed, error };

std::string_view to_string(RunStatus s);

struct EvalMetrics {
  double median_rank = 0.0;
  double iqr_low = 0.0;
  double iqr_high = 0.0;
  double recall_at_1 = 0.0;
  double recall_at_50 = 0.0;
  std::vector<CurvePoint> curve;
};

struct EvalSummary {
  ExperimentConfig config;
  RunStatus status = RunStatus::ok;
  std::size_t n_queries = 0;
  std::size_t pool_size = 0;
  std::optional<EvalMetrics> metrics;  // absent unless status == ok
  std::string message;                 // failure detail
};

EvalSummary summarize(const ExperimentConfig& config, std::span<const RankedResult> rankings,
                      std::size_t pool_size);

// A manifest plus everything derived from it that several configurations can
// share: splits, vocabularies, sparse vectors and fitted T-SVD models.
class ExperimentContext {
 public:
  explicit ExperimentContext(CorpusManifest manifest);
  static ExperimentContext load(const std::filesystem::path& manifest_dir);

  const CorpusManifest& manifest() const { return manifest_; }

  struct Split {
    std::vector<std::size_t> train;  // indices into manifest().links
    std::vector<std::size_t> test;
    std::vector<Document> train_webpages;
  };

  const Split& split(double train_fraction, std::uint64_t seed);
  const Vocabulary& vocabulary(const ExperimentConfig& config);
  const std::vector<SparseVector>& article_vectors(const ExperimentConfig& config);
  const std::vector<SparseVector>& webpage_vectors(const ExperimentConfig& config);
  const TsvdModel& tsvd(const ExperimentConfig& config);

  std::size_t article_index(const std::string& id) const { return article_index_.at(id); }
  std::size_t webpage_index(const std::string& id) const { return webpage_index_.at(id); }

 private:
  using SplitKey = std::tuple<double, std::uint64_t>;
  using VocabKey = std::tuple<double, std::uint64_t, double, IdfVariant>;
  using VectorKey = std::tuple<VocabKey, WeightingScheme>;
  using TsvdKey = std::tuple<VectorKey, std::size_t, std::size_t, std::size_t>;

  static VocabKey vocab_key(const ExperimentConfig& c);
  static VectorKey vector_key(const ExperimentConfig& c);

  CorpusManifest manifest_;
  std::unordered_map<std::string, std::size_t> article_index_;
  std::unordered_map<std::string, std::size_t> webpage_index_;
  std::map<SplitKey, Split> splits_;
  std::map<VocabKey, Vocabulary> vocabularies_;
  std::map<VectorKey, std::vector<SparseVector>> article_vectors_;
  std::map<VectorKey, std::vector<SparseVector>> webpage_vectors_;
  std::map<TsvdKey, TsvdModel> tsvd_models_;
};

struct ExperimentOutput {
  EvalSummary summary;
  std::vector<RankedResult> rankings;
};

struct RunOptions {
  std::size_t threads = 1;  // 0 = hardware concurrency
};

// Vocabulary over all articles plus training webpages, vectorization, optional
// T-SVD fitted on the training stack, optional CCA fitted on training pairs,
// then ranking of every test webpage against test-pair articles + distractors.
ExperimentOutput run_experiment_detailed(ExperimentContext& context, const ExperimentConfig& config,
                                         const RunOptions& options = {});
EvalSummary run_experiment(ExperimentContext& context, const ExperimentConfig& config,
                           const RunOptions& options = {});
// Loads the manifest named by config.manifest_path.
EvalSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Serial over configs; contexts are shared between configs with the same
// manifest path. Per-config failures become rows with status error/cca_failed.
std::vector<EvalSummary> run_grid(std::span<const ExperimentConfig> configs,
                                  const RunOptions& options = {});
std::vector<EvalSummary> run_grid(ExperimentContext& context,
                                  std::span<const ExperimentConfig> configs,
                                  const RunOptions& options = {});

inline const std::vector<std::size_t> kStandardTsvdComponents = {100, 200, 400, 800, 1600};
inline const std::vector<std::size_t> kStandardCcaDims = {50, 100, 200, 400, 800, 1600};

// {binary, tf, tfidf} x {threshold, tsvd k...}, ordered by reduction then scheme.
std::vector<ExperimentConfig> phase1_grid(const ExperimentConfig& base,
                                          std::span<const std::size_t> tsvd_ks = kStandardTsvdComponents);
// TF-IDF; per k, one row without CCA then one row per cca dim <= k.
std::vector<ExperimentConfig> phase2_grid(const ExperimentConfig& base,
                                          std::span<const std::size_t> tsvd_ks = kStandardTsvdComponents,
                                          std::span<const std::size_t> cca_dims = kStandardCcaDims);

// Shortest round-trip decimal form.
std::string format_number(double value);

inline constexpr std::string_view kGridCsvHeader =
    "scheme,reduction,tsvd_k,cca_dims,status,n_queries,median_rank,iqr_low,iqr_high,recall_at_1,"
    "recall_at_50";

void write_grid_csv(std::ostream& out, std::span<const EvalSummary> summaries);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);
std::string summary_json(const EvalSummary& summary);

// grid.csv plus curve_<id>.csv for every successful row.
void write_grid_report(const std::filesystem::path& dir, std::span<const EvalSummary> summaries);

}  // namespace srclink
