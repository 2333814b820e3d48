#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "srclink/decompose.hpp"
#include "srclink/vectorspace.hpp"

namespace srclink {

// Similarity assigned when either vector has zero norm; ranks last.
inline constexpr double kNoSimilarity = -std::numeric_limits<double>::infinity();

double cosine(std::span<const double> u, std::span<const double> v);
double cosine(const SparseVector& u, const SparseVector& v);

// Rounds to 12 decimal places so near-equal scores tie the same way everywhere.
double round_similarity(double sim);

using QueryVector = std::variant<SparseVector, Eigen::VectorXd>;

class CandidatePool {
 public:
  CandidatePool(std::vector<std::string> ids, std::vector<SparseVector> rows, std::string tag);
  CandidatePool(std::vector<std::string> ids, EmbeddingMatrix rows, std::string tag);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const;
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& representation_tag() const { return tag_; }
  bool is_sparse() const { return std::holds_alternative<std::vector<SparseVector>>(rows_); }
  // Position of id, or size() when absent.
  std::size_t position(std::string_view id) const;

  // Rounded cosine of the query against every candidate, in pool order.
  std::vector<double> similarities(const QueryVector& query) const;

 private:
  void index_ids();
  void similarities_sparse(const SparseVector& q, std::span<double> out) const;
  void similarities_dense(const Eigen::VectorXd& q, std::span<double> out) const;

  std::vector<std::string> ids_;
  std::variant<std::vector<SparseVector>, EmbeddingMatrix> rows_;
  std::vector<double> norms_;
  std::string tag_;
  std::unordered_map<std::string, std::size_t> position_;
};

struct RankedResult {
  std::string query_id;
  std::string true_id;
  std::size_t true_rank = 0;  // 1-based, ties counted against the true article
  std::size_t pool_size = 0;
  std::vector<std::pair<std::string, double>> top_k;

  bool operator==(const RankedResult&) const = default;
};

inline constexpr std::size_t kDefaultTopK = 50;

// Pessimistic rank from precomputed similarities: 1 + #candidates (other than
// the true one) with similarity >= the true similarity.
std::size_t pessimistic_rank(std::span<const double> sims, std::size_t true_pos);

RankedResult rank_candidates(const QueryVector& query, const CandidatePool& pool,
                             std::string_view true_id, std::size_t k = kDefaultTopK,
                             std::string query_id = {});

struct Query {
  std::string id;       // webpage id
  std::string true_id;  // linked article id
  QueryVector vector;
};

// n_threads == 0 uses the hardware concurrency. Output order matches input.
std::vector<RankedResult> rank_all(std::span<const Query> queries, const CandidatePool& pool,
                                   std::size_t k = kDefaultTopK, std::size_t n_threads = 1);

// One JSON object per line: query_id, true_id, true_rank, pool_size, topk.
// Non-finite similarities are written as null.
void write_rankings_jsonl(std::ostream& out, std::span<const RankedResult> results);
void write_rankings_jsonl(const std::filesystem::path& path, std::span<const RankedResult> results);

}  // namespace srclink
