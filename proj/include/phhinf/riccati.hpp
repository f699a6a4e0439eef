#pragma once

#include <vector>

#include "phhinf/matkit.hpp"

namespace phhinf::riccati {

// A^T X + X A + W = 0.
Matrix solve_lyapunov(const Matrix& A, const Matrix& W);

// Square-root (Hammarling) solve of A^T X + X A + F F^T = 0 for stable A.
// Returns lower-triangular L with X = L L^T.
Matrix lyapunov_cholesky(const Matrix& A, const Matrix& F);

// A^T X + X A - X G X + H = 0.
struct CareProblem {
  Matrix A;
  Matrix G;
  Matrix H;
};

enum class CareMode { kStabilizing, kAntiStabilizing, kUnverified };
const char* to_string(CareMode mode);

struct CareSolution {
  Matrix X;
  CareMode mode = CareMode::kUnverified;
  double residual = 0.0;  // |res|_F / max(1, |X|_F)
  std::vector<Complex> closure_spectrum;
};

struct CareOptions {
  int newton_steps = 2;
  double residual_tol = 1e-8;
};

CareSolution solve_care(const CareProblem& problem, CareMode mode = CareMode::kStabilizing,
                        const CareOptions& opts = {});

Matrix care_residual_matrix(const CareProblem& problem, const Matrix& X);
double care_residual(const CareProblem& problem, const Matrix& X);
double care_relative_residual(const CareProblem& problem, const Matrix& X);

// One Newton step X + N with (A - G X)^T N + N (A - G X) = -res(X).
Matrix newton_step(const CareProblem& problem, const Matrix& X);

}  // namespace phhinf::riccati
