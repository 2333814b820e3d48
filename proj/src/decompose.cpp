#include "srclink/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "srclink/binio.hpp"
#include "srclink/error.hpp"
#include "srclink/random.hpp"

namespace srclink {

namespace {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseRowMatrix to_sparse_matrix(std::span<const SparseVector> rows, std::size_t dim) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.nnz();
  triplets.reserve(nnz);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dim != dim) throw ContractViolation("sparse rows have inconsistent dimensions");
    for (std::size_t j = 0; j < rows[i].nnz(); ++j) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(rows[i].indices[j]),
                            rows[i].values[j]);
    }
  }
  SparseRowMatrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

// Orthonormal basis of the column space of y (thin Householder Q).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace

TsvdModel fit_tsvd(std::span<const SparseVector> rows, const TsvdOptions& options) {
  if (rows.empty()) throw ContractViolation("fit_tsvd: empty matrix");
  const std::size_t n = rows.size();
  const std::size_t dim = rows.front().dim;
  const std::size_t k = options.k;
  if (k < 1 || k > std::min(n, dim)) {
    throw ContractViolation("fit_tsvd: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(std::min(n, dim)) + "]");
  }
  const SparseRowMatrix a = to_sparse_matrix(rows, dim);
  if (a.squaredNorm() == 0.0) throw DegenerateInputError("fit_tsvd: all-zero matrix");

  const auto l = static_cast<Eigen::Index>(std::min(k + options.oversampling, std::min(n, dim)));
  rng::Engine engine(options.seed);
  Eigen::MatrixXd omega(static_cast<Eigen::Index>(dim), l);
  for (Eigen::Index c = 0; c < omega.cols(); ++c) {
    for (Eigen::Index r = 0; r < omega.rows(); ++r) omega(r, c) = rng::standard_normal(engine);
  }

  Eigen::MatrixXd q = orthonormalize(a * omega);
  for (std::size_t it = 0; it < options.n_iter; ++it) {
    const Eigen::MatrixXd z = orthonormalize(a.transpose() * q);
    q = orthonormalize(a * z);
  }

  // B = Q^T A is small (l x dim); its exact SVD gives the approximate factors.
  const Eigen::MatrixXd bt = a.transpose() * q;  // dim x l, i.e. B^T
  Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU);
  const Eigen::MatrixXd& v = svd.matrixU();  // right singular vectors of B

  TsvdModel model;
  model.k = k;
  model.dim = dim;
  model.seed = options.seed;
  model.n_iter = options.n_iter;
  model.singular_values = svd.singularValues().head(static_cast<Eigen::Index>(k));
  model.components = v.leftCols(static_cast<Eigen::Index>(k)).transpose();
  for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
    Eigen::Index arg;
    model.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.components(r, arg) < 0.0) model.components.row(r) *= -1.0;
  }
  return model;
}

EmbeddingMatrix project(const TsvdModel& model, std::span<const SparseVector> rows) {
  const auto k = static_cast<Eigen::Index>(model.k);
  const EmbeddingMatrix basis = model.components.transpose();  // dim x k, row-major
  EmbeddingMatrix out = EmbeddingMatrix::Zero(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.dim != model.dim) {
      throw ContractViolation("project: vector dim " + std::to_string(r.dim) +
                              " != model dim " + std::to_string(model.dim));
    }
    for (std::size_t j = 0; j < r.nnz(); ++j) {
      out.row(static_cast<Eigen::Index>(i)) += r.values[j] * basis.row(r.indices[j]);
    }
  }
  return out;
}

double explained_variance_ratio(const TsvdModel& model, std::span<const SparseVector> rows) {
  double total = 0.0;
  for (const auto& r : rows) total += r.squared_norm();
  if (total == 0.0) throw DegenerateInputError("explained_variance_ratio: all-zero matrix");
  return model.singular_values.squaredNorm() / total;
}

double reconstruction_error(const TsvdModel& model, std::span<const SparseVector> rows) {
  const EmbeddingMatrix coords = project(model, rows);
  double err = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::RowVectorXd residual = -(coords.row(static_cast<Eigen::Index>(i)) * model.components);
    for (std::size_t j = 0; j < rows[i].nnz(); ++j) residual(rows[i].indices[j]) += rows[i].values[j];
    err += residual.squaredNorm();
  }
  return std::sqrt(err);
}

void write_tsvd(const TsvdModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  binio::write_magic(out, "EVTS1");
  binio::write<std::uint64_t>(out, model.k);
  binio::write<std::uint64_t>(out, model.dim);
  binio::write<std::uint64_t>(out, model.seed);
  binio::write<std::uint64_t>(out, model.n_iter);
  for (Eigen::Index i = 0; i < model.singular_values.size(); ++i) {
    binio::write(out, model.singular_values(i));
  }
  for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.components.cols(); ++c) binio::write(out, model.components(r, c));
  }
  if (!out) throw IoError("error writing " + path.string());
}

TsvdModel read_tsvd(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binio::expect_magic(in, "EVTS1");
  TsvdModel model;
  model.k = binio::read<std::uint64_t>(in);
  model.dim = binio::read<std::uint64_t>(in);
  model.seed = binio::read<std::uint64_t>(in);
  model.n_iter = binio::read<std::uint64_t>(in);
  const auto k = static_cast<Eigen::Index>(model.k);
  const auto dim = static_cast<Eigen::Index>(model.dim);
  model.singular_values.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) model.singular_values(i) = binio::read<double>(in);
  model.components.resize(k, dim);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) model.components(r, c) = binio::read<double>(in);
  }
  return model;
}

}  // namespace srclink
