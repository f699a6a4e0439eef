#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "phhinf/riccati.hpp"

namespace phhinf {
namespace {

using riccati::CareMode;
using riccati::CareProblem;

Matrix random_matrix(int r, int c, std::mt19937& rng) {
  std::normal_distribution<double> N;
  Matrix M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = N(rng);
  return M;
}

Matrix stable_matrix(int n, std::mt19937& rng) {
  Matrix A = random_matrix(n, n, rng);
  double a = matkit::spectral_abscissa(A);
  A.diagonal().array() -= a + 0.5;
  return A;
}

GTEST_TEST(Lyapunov, MatchesKroneckerOracle) {
  std::mt19937 rng(1);
  for (int n : {1, 3, 8}) {
    Matrix A = random_matrix(n, n, rng);
    Matrix F = random_matrix(n, n, rng);
    Matrix W = F + F.transpose();
    Matrix X = riccati::solve_lyapunov(A, W);
    Matrix ref = oracle::kron_lyapunov(A, W);
    EXPECT_LT((X - ref).norm(), 1e-9 * std::max(1.0, ref.norm())) << n;
  }
}

GTEST_TEST(Lyapunov, SpectrumClash) {
  Matrix A(2, 2);
  A << 1, 0, 0, -1;
  try {
    riccati::solve_lyapunov(A, Matrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpectrumClash);
  }
}

GTEST_TEST(LyapunovCholesky, FactorOfKroneckerSolution) {
  std::mt19937 rng(2);
  for (int n : {1, 2, 7, 15}) {
    Matrix A = stable_matrix(n, rng);
    Matrix F = random_matrix(n, 2, rng);
    Matrix L = riccati::lyapunov_cholesky(A, F);
    Matrix ref = oracle::kron_lyapunov(A, F * F.transpose());
    EXPECT_LT((L * L.transpose() - ref).norm(), 1e-9 * ref.norm()) << n;
    EXPECT_LT((L - Matrix(L.triangularView<Eigen::Lower>())).norm(), 1e-300);
  }
}

GTEST_TEST(LyapunovCholesky, RejectsUnstable) {
  try {
    riccati::lyapunov_cholesky(Matrix::Identity(2, 2), Matrix::Ones(2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAsymptoticallyStable);
  }
}

GTEST_TEST(Care, ScalarClosedForm) {
  // x^2 + 2x - 1 = 0 written as -2x - x^2 + 1 = 0 with a = -1, g = 1, h = 1
  CareProblem p{-Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
  riccati::CareSolution s = riccati::solve_care(p, CareMode::kStabilizing);
  EXPECT_NEAR(s.X(0, 0), std::sqrt(2.0) - 1.0, 1e-14);
  EXPECT_EQ(s.mode, CareMode::kStabilizing);
  riccati::CareSolution t = riccati::solve_care(p, CareMode::kAntiStabilizing);
  EXPECT_NEAR(t.X(0, 0), -std::sqrt(2.0) - 1.0, 1e-13);
  EXPECT_EQ(t.mode, CareMode::kAntiStabilizing);
}

GTEST_TEST(Care, RandomResidualAndClosure) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + trial;
    Matrix A = random_matrix(n, n, rng);
    Matrix B = random_matrix(n, 2, rng);
    Matrix C = random_matrix(2, n, rng);
    CareProblem p{A, B * B.transpose(), C.transpose() * C};
    riccati::CareSolution s = riccati::solve_care(p);
    EXPECT_LE(riccati::care_relative_residual(p, s.X), 1e-8);
    EXPECT_EQ(s.mode, CareMode::kStabilizing);
    EXPECT_LT(matkit::spectral_abscissa(A - p.G * s.X), 0.0);
    EXPECT_GE(matkit::lambda_min(s.X), -1e-10 * s.X.norm());
  }
}

GTEST_TEST(Care, ImaginaryAxis) {
  CareProblem p{Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  try {
    riccati::solve_care(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kImaginaryAxisEigenvalue);
  }
}

GTEST_TEST(Care, NewtonStepReducesResidual) {
  std::mt19937 rng(5);
  Matrix A = random_matrix(6, 6, rng), B = random_matrix(6, 1, rng);
  CareProblem p{A, B * B.transpose(), Matrix::Identity(6, 6)};
  Matrix X = riccati::solve_care(p).X;
  Matrix E = random_matrix(6, 6, rng);
  Matrix Xp = X + 1e-4 * (E + E.transpose());
  double r0 = riccati::care_residual(p, Xp);
  double r1 = riccati::care_residual(p, riccati::newton_step(p, Xp));
  EXPECT_LT(r1, 1e-3 * r0);
}

}  // namespace
}  // namespace phhinf
