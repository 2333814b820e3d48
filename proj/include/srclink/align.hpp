#pragma once

#include <cstddef>
#include <filesystem>

#include <Eigen/Dense>

#include "srclink/decompose.hpp"

namespace srclink {

enum class Side { webpage, article };

inline constexpr double kDefaultCcaEpsilon = 1e-3;

struct CcaModel {
  std::size_t d = 0;
  double epsilon = 0.0;
  Eigen::RowVectorXd webpage_mean;
  Eigen::RowVectorXd article_mean;
  Eigen::VectorXd correlations;    // non-increasing, in [0, 1]
  Eigen::MatrixXd webpage_weights; // webpage_dim x d
  Eigen::MatrixXd article_weights; // article_dim x d
};

// Regularized CCA by SVD of the whitened cross-covariance.
//
// webpages.row(i) and articles.row(i) are a training pair. Each side's ridge
// is epsilon times its mean variance, so the fitted directions do not depend
// on the overall scale of either input. Throws CcaNonConvergence when fewer
// than d directions on either side carry variance above the ridge (which
// includes d >= number of pairs), ContractViolation for d < 1, d above an
// input dimension, or mismatched row counts.
CcaModel fit_cca(const EmbeddingMatrix& webpages, const EmbeddingMatrix& articles, std::size_t d,
                 double epsilon = kDefaultCcaEpsilon);

// (rows - side mean) * side weights.
EmbeddingMatrix project_side(const CcaModel& model, Side side, const EmbeddingMatrix& rows);

// "EVCC1", u64 d, u64 webpage_dim, u64 article_dim, f64 epsilon, means
// (webpage then article), correlations[d], webpage weights, article weights
// (row-major); little-endian.
void write_cca(const CcaModel& model, const std::filesystem::path& path);
CcaModel read_cca(const std::filesystem::path& path);

}  // namespace srclink
