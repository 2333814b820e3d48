#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "random_fixtures.hpp"
#include "srclink/align.hpp"
#include "srclink/error.hpp"
#include "support.hpp"

using namespace srclink;

namespace {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / (ac.norm() * bc.norm());
}

}  // namespace

TEST_CASE("rotated copy is recovered with correlation ~1") {
  std::mt19937_64 rng(1);
  const EmbeddingMatrix x = fixtures::gaussian(300, 6, rng);
  const EmbeddingMatrix y = x * fixtures::random_orthogonal(6, rng);
  const CcaModel m = fit_cca(x, y, 4, 1e-6);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(m.correlations(i) > 0.9999);
  const EmbeddingMatrix px = project_side(m, Side::webpage, x);
  const EmbeddingMatrix py = project_side(m, Side::article, y);
  CHECK((px - py).cwiseAbs().maxCoeff() < 1e-4 * px.cwiseAbs().maxCoeff());
}

TEST_CASE("correlations equal the empirical correlations of the projections") {
  std::mt19937_64 rng(2);
  const EmbeddingMatrix z = fixtures::gaussian(400, 3, rng);
  EmbeddingMatrix x = fixtures::gaussian(400, 5, rng);
  EmbeddingMatrix y = fixtures::gaussian(400, 4, rng);
  x.leftCols(3) += 1.5 * z;
  y.leftCols(3) += 0.7 * z;
  const CcaModel m = fit_cca(x, y, 3, 1e-9);
  const EmbeddingMatrix px = project_side(m, Side::webpage, x);
  const EmbeddingMatrix py = project_side(m, Side::article, y);
  for (Eigen::Index c = 0; c < 3; ++c) {
    CHECK(pearson(px.col(c), py.col(c)) == doctest::Approx(m.correlations(c)).epsilon(1e-6));
    if (c > 0) CHECK(m.correlations(c) <= m.correlations(c - 1));
  }
  // Projections are uncorrelated across components.
  CHECK(std::abs(pearson(px.col(0), px.col(1))) < 1e-6);
}

TEST_CASE("scaling the inputs does not change the correlations") {
  std::mt19937_64 rng(3);
  const EmbeddingMatrix x = fixtures::gaussian(200, 4, rng);
  EmbeddingMatrix y = fixtures::gaussian(200, 4, rng);
  y += 0.5 * x;
  const CcaModel a = fit_cca(x, y, 2);
  const CcaModel b = fit_cca(1000.0 * x, 0.001 * y, 2);
  CHECK((a.correlations - b.correlations).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("contract violations and non-convergence") {
  std::mt19937_64 rng(4);
  const EmbeddingMatrix x = fixtures::gaussian(50, 5, rng);
  const EmbeddingMatrix y = fixtures::gaussian(50, 5, rng);
  CHECK_THROWS_AS(fit_cca(x, y, 0), ContractViolation);
  CHECK_THROWS_AS(fit_cca(x, y, 6), ContractViolation);
  CHECK_THROWS_AS(fit_cca(x, fixtures::gaussian(49, 5, rng), 2), ContractViolation);
  CHECK_THROWS_AS(fit_cca(x, y, 2, 0.0), ContractViolation);
  // Too few pairs.
  CHECK_THROWS_AS(fit_cca(x.topRows(3), y.topRows(3), 3), CcaNonConvergence);
  // Rank-deficient side: 2 informative columns, d = 3.
  EmbeddingMatrix low = EmbeddingMatrix::Zero(50, 5);
  low.leftCols(2) = x.leftCols(2);
  CHECK_THROWS_AS(fit_cca(low, y, 3), CcaNonConvergence);
  CHECK_NOTHROW(fit_cca(low, y, 2));
  const CcaModel m = fit_cca(x, y, 2);
  CHECK_THROWS_AS(project_side(m, Side::article, fixtures::gaussian(3, 4, rng)), ContractViolation);
}

TEST_CASE("model persistence") {
  std::mt19937_64 rng(5);
  const EmbeddingMatrix x = fixtures::gaussian(80, 6, rng);
  const EmbeddingMatrix y = fixtures::gaussian(80, 5, rng);
  const CcaModel m = fit_cca(x, y, 3, 0.01);
  const auto dir = testing::scratch_dir("cca_io");
  write_cca(m, dir / "m.evcc");
  const CcaModel r = read_cca(dir / "m.evcc");
  CHECK(r.d == 3);
  CHECK(r.epsilon == 0.01);
  CHECK(r.webpage_mean == m.webpage_mean);
  CHECK(r.article_mean == m.article_mean);
  CHECK(r.correlations == m.correlations);
  CHECK(r.webpage_weights == m.webpage_weights);
  CHECK(r.article_weights == m.article_weights);
}
