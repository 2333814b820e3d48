#include "srclink/align.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "srclink/binio.hpp"
#include "srclink/error.hpp"

namespace srclink {

namespace {

struct Whitening {
  Eigen::MatrixXd inverse_sqrt;  // (C + ridge I)^(-1/2)
  std::size_t effective_rank = 0;
};

// Eigenvalues of the sample covariance above the ridge count towards the
// effective rank; the ridge is epsilon times the mean variance.
Whitening whiten(const Eigen::MatrixXd& centered, double epsilon) {
  const auto n = static_cast<double>(centered.rows());
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / (n - 1.0);
  const double ridge = epsilon * cov.trace() / static_cast<double>(cov.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  Whitening w;
  if (ridge <= 0.0) {
    w.inverse_sqrt = Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
    return w;
  }
  Eigen::VectorXd scale(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > ridge) ++w.effective_rank;
    scale(i) = 1.0 / std::sqrt(std::max(lambda(i), 0.0) + ridge);
  }
  w.inverse_sqrt = eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
  return w;
}

}  // namespace

CcaModel fit_cca(const EmbeddingMatrix& webpages, const EmbeddingMatrix& articles, std::size_t d,
                 double epsilon) {
  if (webpages.rows() != articles.rows()) {
    throw ContractViolation("fit_cca: " + std::to_string(webpages.rows()) + " webpage rows vs " +
                            std::to_string(articles.rows()) + " article rows");
  }
  if (d < 1) throw ContractViolation("fit_cca: d must be >= 1");
  if (!(epsilon > 0.0)) throw ContractViolation("fit_cca: epsilon must be > 0");
  const auto dx = static_cast<std::size_t>(webpages.cols());
  const auto dy = static_cast<std::size_t>(articles.cols());
  if (d > std::min(dx, dy)) {
    throw ContractViolation("fit_cca: d=" + std::to_string(d) + " exceeds input dimension " +
                            std::to_string(std::min(dx, dy)));
  }
  const auto n = static_cast<std::size_t>(webpages.rows());
  if (n <= d) {
    throw CcaNonConvergence("CCA did not converge: " + std::to_string(n) +
                            " training pairs cannot support " + std::to_string(d) +
                            " canonical dimensions");
  }

  CcaModel model;
  model.d = d;
  model.epsilon = epsilon;
  model.webpage_mean = webpages.colwise().mean();
  model.article_mean = articles.colwise().mean();
  const Eigen::MatrixXd xc = webpages.rowwise() - model.webpage_mean;
  const Eigen::MatrixXd yc = articles.rowwise() - model.article_mean;

  const Whitening wx = whiten(xc, epsilon);
  const Whitening wy = whiten(yc, epsilon);
  const std::size_t rank = std::min(wx.effective_rank, wy.effective_rank);
  if (rank < d) {
    throw CcaNonConvergence("CCA did not converge: effective rank " + std::to_string(rank) +
                            " (webpage " + std::to_string(wx.effective_rank) + ", article " +
                            std::to_string(wy.effective_rank) + ") is below d=" +
                            std::to_string(d));
  }

  const Eigen::MatrixXd cxy = (xc.transpose() * yc) / (static_cast<double>(n) - 1.0);
  const Eigen::MatrixXd t = wx.inverse_sqrt * cxy * wy.inverse_sqrt;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const auto dd = static_cast<Eigen::Index>(d);
  model.correlations = svd.singularValues().head(dd).cwiseMin(1.0).cwiseMax(0.0);
  model.webpage_weights = wx.inverse_sqrt * svd.matrixU().leftCols(dd);
  model.article_weights = wy.inverse_sqrt * svd.matrixV().leftCols(dd);
  for (Eigen::Index c = 0; c < dd; ++c) {
    Eigen::Index arg;
    model.webpage_weights.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.webpage_weights(arg, c) < 0.0) {
      model.webpage_weights.col(c) *= -1.0;
      model.article_weights.col(c) *= -1.0;
    }
  }
  return model;
}

EmbeddingMatrix project_side(const CcaModel& model, Side side, const EmbeddingMatrix& rows) {
  const auto& mean = side == Side::webpage ? model.webpage_mean : model.article_mean;
  const auto& weights = side == Side::webpage ? model.webpage_weights : model.article_weights;
  if (rows.cols() != mean.size()) {
    throw ContractViolation("project_side: input dim " + std::to_string(rows.cols()) +
                            " != fitted dim " + std::to_string(mean.size()));
  }
  return (rows.rowwise() - mean) * weights;
}

void write_cca(const CcaModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  auto write_matrix = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) binio::write(out, m(r, c));
    }
  };
  binio::write_magic(out, "EVCC1");
  binio::write<std::uint64_t>(out, model.d);
  binio::write<std::uint64_t>(out, static_cast<std::uint64_t>(model.webpage_mean.size()));
  binio::write<std::uint64_t>(out, static_cast<std::uint64_t>(model.article_mean.size()));
  binio::write(out, model.epsilon);
  for (double v : model.webpage_mean) binio::write(out, v);
  for (double v : model.article_mean) binio::write(out, v);
  for (double v : model.correlations) binio::write(out, v);
  write_matrix(model.webpage_weights);
  write_matrix(model.article_weights);
  if (!out) throw IoError("error writing " + path.string());
}

CcaModel read_cca(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binio::expect_magic(in, "EVCC1");
  CcaModel model;
  model.d = binio::read<std::uint64_t>(in);
  const auto dx = static_cast<Eigen::Index>(binio::read<std::uint64_t>(in));
  const auto dy = static_cast<Eigen::Index>(binio::read<std::uint64_t>(in));
  const auto d = static_cast<Eigen::Index>(model.d);
  model.epsilon = binio::read<double>(in);
  auto read_matrix = [&](Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
    m.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = binio::read<double>(in);
    }
  };
  model.webpage_mean.resize(dx);
  for (auto& v : model.webpage_mean) v = binio::read<double>(in);
  model.article_mean.resize(dy);
  for (auto& v : model.article_mean) v = binio::read<double>(in);
  model.correlations.resize(d);
  for (auto& v : model.correlations) v = binio::read<double>(in);
  read_matrix(model.webpage_weights, dx, d);
  read_matrix(model.article_weights, dy, d);
  return model;
}

}  // namespace srclink
