#include <gtest/gtest.h>

#include <random>

#include "rmslca/mslca.hpp"
#include "support.hpp"

using namespace rmslca;
using rmslca::testing::random_matrix;
using rmslca::testing::random_spd;
using rmslca::testing::random_structure;

namespace {

Matrix random_block_diag(const BlockStructure& bs, std::mt19937_64& rng) {
  Matrix a = Matrix::Zero(bs.q(), bs.q());
  for (int k = 0; k < bs.num_blocks(); ++k) {
    a.block(bs.offset(k), bs.offset(k), bs.dim(k), bs.dim(k)) =
        random_spd(bs.dim(k), rng) + 0.3 * random_matrix(bs.dim(k), bs.dim(k), rng);
  }
  return a;
}

}  // namespace

TEST(BuildT, DiagonalBlocksVanish) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto bs = random_structure(rng);
    const Matrix T = build_T(ScatterMatrix(random_spd(bs.q(), rng), bs));
    for (int k = 0; k < bs.num_blocks(); ++k) EXPECT_LT(pi_block(T, k, k, bs).norm(), 1e-13);
    EXPECT_LT((T - T.transpose()).norm(), 1e-14);
  }
}

TEST(BuildT, ScaleInvariant) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto bs = random_structure(rng);
    const Matrix v = random_spd(bs.q(), rng);
    const Matrix T = build_T(ScatterMatrix(v, bs));
    for (double c : {1e-3, 1.0, 1e3}) {
      EXPECT_LT((build_T(ScatterMatrix(c * v, bs)) - T).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(BuildT, BlockAffineInvariantSpectrum) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto bs = random_structure(rng);
    const Matrix v = random_spd(bs.q(), rng);
    const Matrix a = random_block_diag(bs, rng);
    const auto f1 = fit_from_scatter(ScatterMatrix(v, bs), Estimator::classical);
    const auto f2 = fit_from_scatter(ScatterMatrix(symmetrize(a * v * a.transpose()), bs), Estimator::classical);
    EXPECT_LT((f1.rho - f2.rho).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BuildT, TwoBlocksGiveSignedCanonicalCorrelations) {
  std::mt19937_64 rng(4);
  const BlockStructure bs({2, 3});
  for (int t = 0; t < 20; ++t) {
    const Matrix v = random_spd(5, rng);
    const Matrix v11 = v.topLeftCorner(2, 2), v22 = v.bottomRightCorner(3, 3), v12 = v.topRightCorner(2, 3);
    Eigen::LLT<Matrix> l1(v11), l2(v22);
    const Matrix m = l1.matrixL().solve(l2.matrixL().solve(v12.transpose()).transpose());
    const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
    const auto fit = fit_from_scatter(ScatterMatrix(v, bs), Estimator::classical);
    EXPECT_NEAR(fit.rho(0), sv(0), 1e-12);
    EXPECT_NEAR(fit.rho(1), sv(1), 1e-12);
    EXPECT_NEAR(fit.rho(2), 0.0, 1e-12);
    EXPECT_NEAR(fit.rho(3), -sv(1), 1e-12);
    EXPECT_NEAR(fit.rho(4), -sv(0), 1e-12);
  }
}

TEST(Spectral, EigenpairsOrderedOrthonormalAndSigned) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto bs = random_structure(rng);
    const auto fit = fit_from_scatter(ScatterMatrix(random_spd(bs.q(), rng), bs), Estimator::classical);
    const int q = bs.q();
    EXPECT_LT((fit.beta.transpose() * fit.beta - Matrix::Identity(q, q)).norm(), 1e-12);
    EXPECT_LT((fit.T * fit.beta - fit.beta * fit.rho.asDiagonal()).norm(), 1e-12);
    for (int j = 1; j < q; ++j) EXPECT_GE(fit.rho(j - 1), fit.rho(j));
    for (int j = 0; j < q; ++j) {
      Eigen::Index arg;
      fit.beta.col(j).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(fit.beta(arg, j), 0.0);
    }
    // Constraint sum_k alpha_k' V_kk alpha_k = 1 and alpha' Phi alpha = I.
    EXPECT_LT((fit.alpha.transpose() * fit.phi * fit.alpha - Matrix::Identity(q, q)).norm(), 1e-10);
  }
}

TEST(Spectral, ZeroMatrixGivesIdentityBasis) {
  const Matrix z = Matrix::Zero(3, 3);
  const auto s = spectral(z, Matrix::Identity(3, 3));
  EXPECT_EQ(s.rho, Vector::Zero(3));
  EXPECT_EQ(s.beta, Matrix::Identity(3, 3));
  EXPECT_THROW(spectral(z, Matrix::Identity(2, 2)), InvalidArgument);
}

TEST(ClassicalFit, LeadingDirectionMaximizesVariance) {
  std::mt19937_64 rng(6);
  const BlockStructure bs({2, 2, 1});
  const Matrix l = random_matrix(5, 5, rng);
  const Matrix x = random_matrix(400, 5, rng) * l.transpose();
  const auto fit = classical_fit(x, bs);
  const auto rep = maximization_check(fit, x, 5000, 7);
  EXPECT_TRUE(rep.passed);
  EXPECT_GE(rep.alpha_objective, rep.best_random_objective);
  // The maximum equals 1 + rho_1.
  EXPECT_NEAR(rep.alpha_objective, 1.0 + fit.rho(0), 1e-10);
}

TEST(ClassicalFit, UsesDivisorN) {
  std::mt19937_64 rng(8);
  const Matrix x = random_matrix(10, 3, rng);
  const Matrix c = x.rowwise() - x.colwise().mean();
  EXPECT_LT((sample_covariance(x) - c.transpose() * c / 10.0).norm(), 1e-14);
  EXPECT_THROW(classical_fit(x, BlockStructure({1, 1})), InvalidArgument);
}

TEST(RobustFit, MatchesTOfCorrectedScatter) {
  std::mt19937_64 rng(9);
  const BlockStructure bs({2, 2});
  const Matrix v = random_spd(4, rng);
  const Matrix x = sample(EllipticalModel::gaussian(v), 300, std::uint64_t{10});
  RobustOptions opt;
  opt.mcd.restarts = 30;
  const auto fit = robust_fit(x, bs, opt);
  ASSERT_TRUE(fit.mcd.has_value());
  EXPECT_EQ(fit.estimator, Estimator::mcd);
  EXPECT_DOUBLE_EQ(*fit.gamma, 0.75);
  EXPECT_EQ(fit.mcd->h, subset_size(300, 0.75));
  const auto c = compute_constants(0.75, EllipticalModel::gaussian(4));
  const Matrix T2 = build_T(ScatterMatrix(consistency_correct(*fit.mcd, c), bs));
  EXPECT_LT((fit.T - T2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RobustFit, ResistsOutlyingCluster) {
  std::mt19937_64 rng(11);
  const BlockStructure bs({2, 2});
  Matrix x = sample(EllipticalModel::gaussian(4), 400, std::uint64_t{12});
  for (int i = 360; i < 400; ++i) x.row(i) << 20.0, 20.0, 20.0, 20.0;
  RobustOptions opt;
  opt.mcd.restarts = 50;
  const auto robust = robust_fit(x, bs, opt);
  const auto classical = classical_fit(x, bs);
  EXPECT_LT(robust.rho(0), 0.35);
  EXPECT_GT(classical.rho(0), 0.8);
}

TEST(Json, Shape) {
  std::mt19937_64 rng(13);
  const BlockStructure bs({1, 2});
  const auto fit = fit_from_scatter(ScatterMatrix(random_spd(3, rng), bs), Estimator::classical);
  const auto j = to_json(fit);
  EXPECT_EQ(j["estimator"], "classical");
  EXPECT_EQ(j["rho"].size(), 3u);
  EXPECT_EQ(j["alpha"].size(), 3u);
  EXPECT_EQ(j["alpha"][0].size(), 3u);
  EXPECT_DOUBLE_EQ(j["alpha"][1][2].get<double>(), fit.alpha(2, 1));
  EXPECT_FALSE(j.contains("gamma"));
}
