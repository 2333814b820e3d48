#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include <Eigen/Dense>

#include "srclink/vectorspace.hpp"

namespace srclink {

// Dense reduced representations, one document per row.
using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TsvdOptions {
  std::size_t k = 100;
  std::uint64_t seed = 0;
  std::size_t n_iter = 7;
  std::size_t oversampling = 10;
};

struct TsvdModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::size_t n_iter = 0;
  Eigen::VectorXd singular_values;  // non-increasing
  EmbeddingMatrix components;       // k x dim, orthonormal rows
};

// Randomized truncated SVD (range finder with power iterations and QR
// re-orthonormalization, then an exact SVD of the small projected matrix).
// Component signs are fixed so the largest-magnitude entry of each row is
// positive. Throws ContractViolation for k outside [1, min(rows, dim)] and
// DegenerateInputError for an all-zero matrix.
TsvdModel fit_tsvd(std::span<const SparseVector> rows, const TsvdOptions& options);

// Row i = rows[i] * components^T.
EmbeddingMatrix project(const TsvdModel& model, std::span<const SparseVector> rows);

// sum(sigma^2) / ||A||_F^2 over the fitted matrix.
double explained_variance_ratio(const TsvdModel& model, std::span<const SparseVector> rows);

// ||A - A V^T V||_F for the model's components V.
double reconstruction_error(const TsvdModel& model, std::span<const SparseVector> rows);

// "EVTS1", u64 k, u64 dim, u64 seed, u64 n_iter, f64 singular_values[k],
// f64 components[k*dim] row-major; little-endian.
void write_tsvd(const TsvdModel& model, const std::filesystem::path& path);
TsvdModel read_tsvd(const std::filesystem::path& path);

}  // namespace srclink
