#include "srclink/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "srclink/error.hpp"

namespace srclink {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ContractViolation("cosine: dimension mismatch");
  double uv = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return kNoSimilarity;
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

double cosine(const SparseVector& u, const SparseVector& v) {
  if (u.dim != v.dim) throw ContractViolation("cosine: dimension mismatch");
  const double uu = u.squared_norm();
  const double vv = v.squared_norm();
  if (uu == 0.0 || vv == 0.0) return kNoSimilarity;
  return dot(u, v) / (std::sqrt(uu) * std::sqrt(vv));
}

double round_similarity(double sim) {
  if (!std::isfinite(sim)) return sim;
  return std::round(sim * 1e12) / 1e12;
}

// ---- CandidatePool ---------------------------------------------------------------

CandidatePool::CandidatePool(std::vector<std::string> ids, std::vector<SparseVector> rows,
                             std::string tag)
    : ids_(std::move(ids)), tag_(std::move(tag)) {
  if (ids_.size() != rows.size()) throw ContractViolation("CandidatePool: ids/rows size mismatch");
  norms_.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.dim != rows.front().dim) throw ContractViolation("CandidatePool: inconsistent dims");
    norms_.push_back(std::sqrt(r.squared_norm()));
  }
  rows_ = std::move(rows);
  index_ids();
}

CandidatePool::CandidatePool(std::vector<std::string> ids, EmbeddingMatrix rows, std::string tag)
    : ids_(std::move(ids)), tag_(std::move(tag)) {
  if (ids_.size() != static_cast<std::size_t>(rows.rows())) {
    throw ContractViolation("CandidatePool: ids/rows size mismatch");
  }
  norms_.resize(ids_.size());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) norms_[static_cast<std::size_t>(i)] = rows.row(i).norm();
  rows_ = std::move(rows);
  index_ids();
}

void CandidatePool::index_ids() {
  position_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!position_.emplace(ids_[i], i).second) {
      throw ContractViolation("CandidatePool: duplicate id " + ids_[i]);
    }
  }
}

std::size_t CandidatePool::dim() const {
  if (const auto* sparse = std::get_if<std::vector<SparseVector>>(&rows_)) {
    return sparse->empty() ? 0 : sparse->front().dim;
  }
  return static_cast<std::size_t>(std::get<EmbeddingMatrix>(rows_).cols());
}

std::size_t CandidatePool::position(std::string_view id) const {
  const auto it = position_.find(std::string(id));
  return it == position_.end() ? ids_.size() : it->second;
}

void CandidatePool::similarities_sparse(const SparseVector& q, std::span<double> out) const {
  const auto& rows = std::get<std::vector<SparseVector>>(rows_);
  const double qn = std::sqrt(q.squared_norm());
  if (qn == 0.0) {
    std::fill(out.begin(), out.end(), kNoSimilarity);
    return;
  }
  std::vector<double> dense(q.dim, 0.0);
  for (std::size_t j = 0; j < q.nnz(); ++j) dense[q.indices[j]] = q.values[j];
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (norms_[c] == 0.0) {
      out[c] = kNoSimilarity;
      continue;
    }
    const auto& r = rows[c];
    double s = 0.0;
    for (std::size_t j = 0; j < r.nnz(); ++j) s += r.values[j] * dense[r.indices[j]];
    out[c] = round_similarity(s / (qn * norms_[c]));
  }
}

void CandidatePool::similarities_dense(const Eigen::VectorXd& q, std::span<double> out) const {
  const auto& rows = std::get<EmbeddingMatrix>(rows_);
  const double qn = q.norm();
  if (qn == 0.0) {
    std::fill(out.begin(), out.end(), kNoSimilarity);
    return;
  }
  // Scan the pool in contiguous blocks of rows.
  constexpr Eigen::Index kBlock = 4096;
  for (Eigen::Index start = 0; start < rows.rows(); start += kBlock) {
    const Eigen::Index len = std::min(kBlock, rows.rows() - start);
    const Eigen::VectorXd dots = rows.middleRows(start, len) * q;
    for (Eigen::Index i = 0; i < len; ++i) {
      const auto c = static_cast<std::size_t>(start + i);
      out[c] = norms_[c] == 0.0 ? kNoSimilarity : round_similarity(dots(i) / (qn * norms_[c]));
    }
  }
}

std::vector<double> CandidatePool::similarities(const QueryVector& query) const {
  std::vector<double> sims(ids_.size());
  if (const auto* sq = std::get_if<SparseVector>(&query)) {
    if (!is_sparse()) throw ContractViolation("sparse query against a dense candidate pool");
    if (!ids_.empty() && sq->dim != dim()) throw ContractViolation("query/pool dimension mismatch");
    similarities_sparse(*sq, sims);
  } else {
    const auto& dq = std::get<Eigen::VectorXd>(query);
    if (is_sparse()) throw ContractViolation("dense query against a sparse candidate pool");
    if (static_cast<std::size_t>(dq.size()) != dim()) {
      throw ContractViolation("query/pool dimension mismatch");
    }
    similarities_dense(dq, sims);
  }
  return sims;
}

// ---- ranking -----------------------------------------------------------------------

std::size_t pessimistic_rank(std::span<const double> sims, std::size_t true_pos) {
  if (true_pos >= sims.size()) throw ContractViolation("pessimistic_rank: position out of range");
  const double target = sims[true_pos];
  std::size_t ahead = 0;
  for (std::size_t c = 0; c < sims.size(); ++c) {
    if (c != true_pos && sims[c] >= target) ++ahead;
  }
  return ahead + 1;
}

RankedResult rank_candidates(const QueryVector& query, const CandidatePool& pool,
                             std::string_view true_id, std::size_t k, std::string query_id) {
  const std::size_t true_pos = pool.position(true_id);
  if (true_pos == pool.size()) {
    throw ContractViolation("rank_candidates: true article " + std::string(true_id) +
                            " is not in the candidate pool");
  }
  const std::vector<double> sims = pool.similarities(query);

  RankedResult result;
  result.query_id = std::move(query_id);
  result.true_id = std::string(true_id);
  result.pool_size = pool.size();
  result.true_rank = pessimistic_rank(sims, true_pos);

  const auto& ids = pool.ids();
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t top = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return ids[a] < ids[b];
                    });
  result.top_k.reserve(top);
  for (std::size_t i = 0; i < top; ++i) result.top_k.emplace_back(ids[order[i]], sims[order[i]]);
  return result;
}

std::vector<RankedResult> rank_all(std::span<const Query> queries, const CandidatePool& pool,
                                   std::size_t k, std::size_t n_threads) {
  std::vector<RankedResult> results(queries.size());
  if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, std::max<std::size_t>(queries.size(), 1));

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      results[i] = rank_candidates(queries[i].vector, pool, queries[i].true_id, k, queries[i].id);
    }
  };
  if (n_threads <= 1) {
    work(0, queries.size());
    return results;
  }

  std::vector<std::exception_ptr> errors(n_threads);
  {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (queries.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t begin = std::min(queries.size(), t * chunk);
      const std::size_t end = std::min(queries.size(), begin + chunk);
      workers.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void write_rankings_jsonl(std::ostream& out, std::span<const RankedResult> results) {
  for (const auto& r : results) {
    nlohmann::ordered_json topk = nlohmann::ordered_json::array();
    for (const auto& [id, sim] : r.top_k) {
      topk.push_back({id, std::isfinite(sim) ? nlohmann::ordered_json(sim) : nlohmann::ordered_json()});
    }
    const nlohmann::ordered_json obj = {
        {"query_id", r.query_id}, {"true_id", r.true_id},     {"true_rank", r.true_rank},
        {"pool_size", r.pool_size}, {"topk", std::move(topk)},
    };
    out << obj.dump() << '\n';
  }
}

void write_rankings_jsonl(const std::filesystem::path& path, std::span<const RankedResult> results) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_rankings_jsonl(out, results);
}

}  // namespace srclink
