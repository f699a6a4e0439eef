#include "phhinf/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

namespace phhinf::matkit {

namespace {

lapack_logical select_left(const double* wr, const double* /*wi*/) { return *wr < 0.0; }
lapack_logical select_right(const double* wr, const double* /*wi*/) { return *wr > 0.0; }

std::string dims(const Matrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

}  // namespace

void require_finite(const Matrix& M, std::string_view what) {
  if (!M.allFinite()) throw Error(ErrorCode::kNonFinite, std::string(what) + " has non-finite entries");
}

void require_square(const Matrix& M, std::string_view what) {
  if (M.rows() != M.cols())
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " must be square, got " + dims(M));
}

void require_symmetric(const Matrix& M, double tol, std::string_view what) {
  require_square(M, what);
  double scale = std::max(1.0, M.norm());
  if ((M - M.transpose()).norm() > tol * scale)
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is not symmetric");
}

SchurForm real_schur(const Matrix& A, Region region) {
  require_square(A, "real_schur input");
  require_finite(A, "real_schur input");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  SchurForm out;
  out.T = A;
  out.Z.resize(n, n);
  if (n == 0) return out;
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  char sort = region == Region::kAll ? 'N' : 'S';
  LAPACK_D_SELECT2 sel = region == Region::kOpenRight ? select_right : select_left;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', sort, sel, n, out.T.data(), n, &sdim,
                                  wr.data(), wi.data(), out.Z.data(), n);
  if (info < 0) throw Error(ErrorCode::kInvalidArgument, "dgees argument " + std::to_string(-info));
  if (info > 0 && info <= n) throw Error(ErrorCode::kNonConvergence, "QR iteration did not converge");
  // info == n+1 / n+2: reordering was ill-conditioned; sdim is still reported and
  // callers check it against what they expect.
  out.selected = region == Region::kAll ? 0 : sdim;
  out.eigenvalues.resize(n);
  for (lapack_int i = 0; i < n; ++i) out.eigenvalues[i] = Complex(wr[i], wi[i]);
  return out;
}

Svd svd_signed(const Matrix& A) {
  require_finite(A, "svd input");
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Eigen::Index j = 0; j < out.U.cols(); ++j) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < out.U.rows(); ++i) {
      // strict comparison keeps the lowest index on ties
      if (std::abs(out.U(i, j)) > mag * (1.0 + 1e-12)) {
        mag = std::abs(out.U(i, j));
        best = i;
      }
    }
    if (out.U(best, j) < 0.0) {
      out.U.col(j) *= -1.0;
      out.V.col(j) *= -1.0;
    }
  }
  return out;
}

Matrix psd_factor(const Matrix& A, double tol) {
  require_square(A, "psd_factor input");
  require_finite(A, "psd_factor input");
  const Eigen::Index n = A.rows();
  if (n == 0) return Matrix(0, 0);
  const double fro = A.norm();
  if ((A - A.transpose()).norm() > tol * std::max(fro, 1e-300) + 1e-300)
    throw Error(ErrorCode::kInvalidArgument, "psd_factor input is not symmetric");
  if (fro == 0.0) return Matrix(n, 0);
  Matrix S = sym(A);
  Vector ev = sym_eigvals(S);
  const double spec = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  if (ev(0) < -tol * spec)
    throw Error(ErrorCode::kIndefiniteMatrix,
                "lambda_min = " + std::to_string(ev(0)) + " below -tol*|A|_2");

  const double stop = tol * fro / static_cast<double>(n);
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Matrix L = Matrix::Zero(n, n);  // rows in permuted order
  Eigen::Index k = 0;
  for (; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (S(i, i) > S(piv, piv)) piv = i;
    if (S(piv, piv) <= stop) break;
    if (piv != k) {
      S.row(k).swap(S.row(piv));
      S.col(k).swap(S.col(piv));
      L.row(k).swap(L.row(piv));
      std::swap(perm[k], perm[piv]);
    }
    const double d = std::sqrt(S(k, k));
    L(k, k) = d;
    for (Eigen::Index i = k + 1; i < n; ++i) L(i, k) = S(i, k) / d;
    const Eigen::Index rem = n - k - 1;
    if (rem > 0) {
      S.bottomRightCorner(rem, rem).noalias() -=
          L.col(k).tail(rem) * L.col(k).tail(rem).transpose();
    }
  }
  Matrix out(n, k);
  for (Eigen::Index i = 0; i < n; ++i) out.row(perm[i]) = L.row(i).head(k);
  return out;
}

Matrix solve_linear(const Matrix& A, const Matrix& B) {
  require_square(A, "solve_linear matrix");
  if (A.rows() != B.rows())
    throw Error(ErrorCode::kDimensionMismatch, "solve_linear: " + dims(A) + " vs " + dims(B));
  require_finite(A, "solve_linear matrix");
  require_finite(B, "solve_linear rhs");
  Eigen::PartialPivLU<Matrix> lu(A);
  if (A.rows() > 0 && !(lu.rcond() > 1e-14))
    throw Error(ErrorCode::kSingularMatrix, "reciprocal condition " + std::to_string(lu.rcond()));
  return lu.solve(B);
}

Matrix inverse(const Matrix& A) {
  return solve_linear(A, Matrix::Identity(A.rows(), A.cols()));
}

std::vector<Complex> eigvals(const Matrix& A) {
  require_square(A, "eigvals input");
  require_finite(A, "eigvals input");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  std::vector<Complex> out(n);
  if (n == 0) return out;
  Matrix W = A;
  std::vector<double> wr(n), wi(n);
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, W.data(), n, wr.data(), wi.data(),
                                  nullptr, 1, nullptr, 1);
  if (info != 0) throw Error(ErrorCode::kNonConvergence, "dgeev info " + std::to_string(info));
  for (lapack_int i = 0; i < n; ++i) out[i] = Complex(wr[i], wi[i]);
  return out;
}

Vector sym_eigvals(const Matrix& S) {
  require_square(S, "sym_eigvals input");
  require_finite(S, "sym_eigvals input");
  if (S.rows() == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double lambda_min(const Matrix& S) { return sym_eigvals(S).minCoeff(); }
double lambda_max(const Matrix& S) { return sym_eigvals(S).maxCoeff(); }

double spectral_abscissa(const Matrix& A) {
  double m = -std::numeric_limits<double>::infinity();
  for (const Complex& l : eigvals(A)) m = std::max(m, l.real());
  return m;
}

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double sigma_min(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double cond2(const Matrix& M) {
  Eigen::BDCSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  double lo = s(s.size() - 1);
  return lo == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / lo;
}

Matrix chol_lower(const Matrix& A) {
  require_square(A, "cholesky input");
  Eigen::LLT<Matrix> llt(sym(A));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kIndefiniteMatrix, "matrix is not positive definite");
  return llt.matrixL();
}

}  // namespace phhinf::matkit
