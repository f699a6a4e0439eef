#include "phhinf/riccati.hpp"

#include <cmath>

#include <lapacke.h>

namespace phhinf::riccati {

using matkit::require_finite;
using matkit::require_square;

const char* to_string(CareMode mode) {
  switch (mode) {
    case CareMode::kStabilizing: return "stabilizing";
    case CareMode::kAntiStabilizing: return "anti-stabilizing";
    case CareMode::kUnverified: return "unverified";
  }
  return "unverified";
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& W) {
  require_square(A, "Lyapunov A");
  if (W.rows() != A.rows() || W.cols() != A.cols())
    throw Error(ErrorCode::kDimensionMismatch, "Lyapunov rhs must match A");
  require_finite(W, "Lyapunov rhs");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (n == 0) return Matrix(0, 0);

  matkit::SchurForm sf = matkit::real_schur(A);
  for (const Complex& a : sf.eigenvalues)
    for (const Complex& b : sf.eigenvalues)
      if (std::abs(a + b) <= 1e-12 * (std::abs(a) + std::abs(b)))
        throw Error(ErrorCode::kSpectrumClash, "A and -A share an eigenvalue");

  Matrix C = -(sf.Z.transpose() * W * sf.Z);
  double scale = 1.0;
  lapack_int info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'T', 'N', 1, n, n, sf.T.data(), n,
                                   sf.T.data(), n, C.data(), n, &scale);
  if (info < 0) throw Error(ErrorCode::kInvalidArgument, "dtrsyl argument");
  if (info == 1) throw Error(ErrorCode::kSpectrumClash, "dtrsyl perturbed close eigenvalues");
  Matrix X = sf.Z * (C / scale) * sf.Z.transpose();
  return matkit::sym(X);
}

Matrix lyapunov_cholesky(const Matrix& A, const Matrix& F) {
  require_square(A, "Lyapunov A");
  require_finite(A, "Lyapunov A");
  require_finite(F, "Lyapunov factor");
  const Eigen::Index n = A.rows();
  if (F.rows() != n) throw Error(ErrorCode::kDimensionMismatch, "F must have n rows");
  if (n == 0) return Matrix(0, 0);

  Eigen::ComplexSchur<CMatrix> cs(A.cast<Complex>());
  if (cs.info() != Eigen::Success) throw Error(ErrorCode::kNonConvergence, "complex Schur");
  const CMatrix& T = cs.matrixT();
  const CMatrix& Z = cs.matrixU();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(T(i, i).real() < 0.0))
      throw Error(ErrorCode::kNotAsymptoticallyStable, "Hammarling needs a stable A");

  // T^H X + X T = -R^H R with R triangular from F^T Z
  CMatrix M = F.transpose().cast<Complex>() * Z;
  CMatrix R = CMatrix::Zero(n, n);
  if (M.rows() > 0) {
    Eigen::HouseholderQR<CMatrix> qr(M);
    Eigen::Index k = std::min<Eigen::Index>(M.rows(), n);
    R.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  }

  CMatrix U = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index rem = n - k - 1;
    const Complex tau = T(k, k);
    const Complex rho = R(k, k);
    const double ups = std::abs(rho) / std::sqrt(-2.0 * tau.real());
    U(k, k) = ups;
    if (rem == 0) break;
    Eigen::RowVectorXcd r = R.row(k).tail(rem);
    Eigen::RowVectorXcd w;
    if (ups == 0.0) {
      w = r;
    } else {
      Eigen::RowVectorXcd rhs = -ups * T.row(k).tail(rem) - (std::conj(rho) / ups) * r;
      CMatrix T2 = T.bottomRightCorner(rem, rem);
      T2.diagonal().array() += std::conj(tau);
      Eigen::VectorXcd ut =
          T2.triangularView<Eigen::Upper>().transpose().solve(rhs.transpose());
      Eigen::RowVectorXcd u = ut.transpose();
      U.row(k).tail(rem) = u;
      w = r - (rho / ups) * u;
    }
    // fold w into the trailing triangle with Givens rotations
    for (Eigen::Index j = 0; j < rem; ++j) {
      const Eigen::Index row = k + 1 + j;
      Complex a = R(row, row), b = w(j);
      if (b == Complex(0.0)) continue;
      double h = std::hypot(std::abs(a), std::abs(b));
      Complex c, s;
      if (std::abs(a) == 0.0) {
        c = 0.0;
        s = std::conj(b) / std::abs(b);
      } else {
        c = std::abs(a) / h;
        s = (a / std::abs(a)) * std::conj(b) / h;
      }
      const Eigen::Index len = n - row;
      Eigen::RowVectorXcd rj = R.row(row).tail(len);
      Eigen::RowVectorXcd wj = w.tail(len);
      R.row(row).tail(len) = c * rj + s * wj;
      w.tail(len) = -std::conj(s) * rj + c * wj;
      w(j) = 0.0;
    }
  }

  CMatrix L = Z * U.adjoint();
  Matrix K(n, 2 * n);
  K << L.real(), L.imag();
  Eigen::HouseholderQR<Matrix> qr(K.transpose());
  Matrix Rr = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  // fix signs so the diagonal is nonnegative
  for (Eigen::Index i = 0; i < n; ++i)
    if (Rr(i, i) < 0.0) Rr.row(i) *= -1.0;
  return Rr.transpose();
}

Matrix care_residual_matrix(const CareProblem& p, const Matrix& X) {
  Matrix XA = X * p.A;
  return XA + XA.transpose() - X * p.G * X + p.H;
}

double care_residual(const CareProblem& p, const Matrix& X) {
  return care_residual_matrix(p, X).norm();
}

double care_relative_residual(const CareProblem& p, const Matrix& X) {
  return care_residual(p, X) / std::max(1.0, X.norm());
}

Matrix newton_step(const CareProblem& p, const Matrix& X) {
  Matrix Ac = p.A - p.G * X;
  return matkit::sym(X + solve_lyapunov(Ac, care_residual_matrix(p, X)));
}

namespace {

void check_problem(const CareProblem& p) {
  require_square(p.A, "CARE A");
  const auto n = p.A.rows();
  if (p.G.rows() != n || p.G.cols() != n || p.H.rows() != n || p.H.cols() != n)
    throw Error(ErrorCode::kDimensionMismatch, "CARE G and H must be n x n");
  require_finite(p.A, "CARE A");
  require_finite(p.G, "CARE G");
  require_finite(p.H, "CARE H");
  matkit::require_symmetric(p.G, 1e-10, "CARE G");
  matkit::require_symmetric(p.H, 1e-10, "CARE H");
}

}  // namespace

CareSolution solve_care(const CareProblem& p, CareMode mode, const CareOptions& opts) {
  check_problem(p);
  if (mode == CareMode::kUnverified)
    throw Error(ErrorCode::kInvalidArgument, "requested mode must be (anti-)stabilizing");
  const Eigen::Index n = p.A.rows();
  Matrix M(2 * n, 2 * n);
  M << p.A, -matkit::sym(p.G), -matkit::sym(p.H), -p.A.transpose();

  matkit::SchurForm sf = matkit::real_schur(
      M, mode == CareMode::kStabilizing ? matkit::Region::kOpenLeft : matkit::Region::kOpenRight);
  for (const Complex& l : sf.eigenvalues)
    if (std::abs(l.real()) <= 1e-8 * std::max(1.0, std::abs(l)))
      throw Error(ErrorCode::kImaginaryAxisEigenvalue,
                  "Hamiltonian eigenvalue " + std::to_string(l.real()) + "+" +
                      std::to_string(l.imag()) + "i");
  if (sf.selected != n)
    throw Error(ErrorCode::kImaginaryAxisEigenvalue,
                "Hamiltonian has " + std::to_string(sf.selected) + " eigenvalues in the half "
                "plane, expected " + std::to_string(n));

  Matrix U1 = sf.Z.topLeftCorner(n, n);
  Matrix U2 = sf.Z.bottomLeftCorner(n, n);
  if (matkit::cond2(U1) > 1e12)
    throw Error(ErrorCode::kSubspaceNotGraph, "invariant subspace basis is ill-conditioned");
  Matrix X = matkit::sym(U1.transpose().partialPivLu().solve(U2.transpose()).transpose());

  double res = care_relative_residual(p, X);
  for (int k = 0; k < opts.newton_steps && res > 0.0; ++k) {
    Matrix Xn;
    try {
      Xn = newton_step(p, X);
    } catch (const Error&) {
      break;
    }
    if (!Xn.allFinite()) break;
    double rn = care_relative_residual(p, Xn);
    if (!(rn < res)) break;
    X = std::move(Xn);
    res = rn;
  }
  if (!(res <= opts.residual_tol))
    throw Error(ErrorCode::kResidualTooLarge, "CARE residual " + std::to_string(res));

  CareSolution out;
  out.X = std::move(X);
  out.residual = res;
  out.closure_spectrum = matkit::eigvals(p.A - p.G * out.X);
  bool ok = true;
  for (const Complex& l : out.closure_spectrum) {
    if (mode == CareMode::kStabilizing && !(l.real() < 0.0)) ok = false;
    if (mode == CareMode::kAntiStabilizing && !(l.real() > 0.0)) ok = false;
  }
  out.mode = ok ? mode : CareMode::kUnverified;
  return out;
}

}  // namespace phhinf::riccati
