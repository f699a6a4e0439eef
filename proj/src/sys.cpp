#include "phhinf/sys.hpp"

#include <cmath>

namespace phhinf::sys {

using matkit::require_finite;

namespace {

void check_dims(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, what);
}

double rel_scale(const Matrix& M) { return std::max(1.0, M.norm()); }

}  // namespace

StateSpace::StateSpace(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  check_dims(A_.rows() == A_.cols() && A_.rows() > 0, "A must be square and nonempty");
  check_dims(B_.rows() == A_.rows() && B_.cols() > 0, "B must have n rows");
  check_dims(C_.cols() == A_.cols() && C_.rows() > 0, "C must have n columns");
  check_dims(D_.rows() == C_.rows() && D_.cols() == B_.cols(), "D must be p x m");
  check_dims(B_.cols() <= A_.rows() && C_.rows() <= A_.rows(), "need m <= n and p <= n");
  require_finite(A_, "A");
  require_finite(B_, "B");
  require_finite(C_, "C");
  require_finite(D_, "D");
}

StateSpace::StateSpace(Matrix A, Matrix B, Matrix C)
    : StateSpace(A, B, C, Matrix::Zero(C.rows(), B.cols())) {}

PHSystem::PHSystem(Matrix J, Matrix R, Matrix Q, Matrix B)
    : J_(std::move(J)), R_(std::move(R)), Q_(std::move(Q)), B_(std::move(B)) {
  const auto n = J_.rows();
  check_dims(n > 0 && J_.cols() == n, "J must be square and nonempty");
  check_dims(R_.rows() == n && R_.cols() == n, "R must be n x n");
  check_dims(Q_.rows() == n && Q_.cols() == n, "Q must be n x n");
  check_dims(B_.rows() == n && B_.cols() > 0 && B_.cols() <= n, "B must be n x m with m <= n");
  require_finite(J_, "J");
  require_finite(R_, "R");
  require_finite(Q_, "Q");
  require_finite(B_, "B");
  if ((J_ + J_.transpose()).norm() > kTol * rel_scale(J_))
    throw Error(ErrorCode::kInvalidArgument, "J is not skew-symmetric");
  if ((R_ - R_.transpose()).norm() > kTol * rel_scale(R_))
    throw Error(ErrorCode::kInvalidArgument, "R is not symmetric");
  if ((Q_ - Q_.transpose()).norm() > kTol * rel_scale(Q_))
    throw Error(ErrorCode::kInvalidArgument, "Q is not symmetric");
  if (matkit::lambda_min(R_) < -kTol * rel_scale(R_))
    throw Error(ErrorCode::kIndefiniteMatrix, "R is not positive semidefinite");
  if (!(matkit::lambda_min(Q_) > 0.0))
    throw Error(ErrorCode::kIndefiniteMatrix, "Q is not positive definite");
}

StateSpace ph_to_ss(const PHSystem& ph) { return StateSpace(ph.A(), ph.B(), ph.C()); }

PHSystem ph_from_hamiltonian(const Matrix& A, const Matrix& B, const Matrix& X,
                             const Matrix& X_inv) {
  Matrix AXi = A * X_inv;
  Matrix J = 0.5 * (AXi - AXi.transpose());
  Matrix R = -0.5 * (AXi + AXi.transpose());
  return PHSystem(std::move(J), std::move(R), matkit::sym(X), B);
}

PHSystem ss_to_ph(const StateSpace& ss, const Matrix& X, double tol) {
  const int n = ss.n();
  check_dims(X.rows() == n && X.cols() == n, "X must be n x n");
  require_finite(X, "X");
  if (ss.has_feedthrough()) throw Error(ErrorCode::kInvalidArgument, "ss_to_ph needs D = 0");
  if (ss.p() != ss.m()) throw Error(ErrorCode::kDimensionMismatch, "ss_to_ph needs p = m");
  Matrix Xs = matkit::sym(X);
  if ((X - X.transpose()).norm() > 1e-10 * rel_scale(X))
    throw Error(ErrorCode::kInvalidArgument, "X is not symmetric");
  if (!(matkit::lambda_min(Xs) > 0.0))
    throw Error(ErrorCode::kIndefiniteMatrix, "X is not positive definite");
  double mismatch = (ss.C() - ss.B().transpose() * Xs).norm();
  if (mismatch > tol * std::max(ss.C().norm(), 1e-300))
    throw Error(ErrorCode::kGramMismatch, "|C - B^T X| = " + std::to_string(mismatch));
  Matrix XA = Xs * ss.A();
  double top = matkit::lambda_max(XA + XA.transpose());
  if (top > tol * std::max(XA.norm(), 1e-300))
    throw Error(ErrorCode::kDissipationViolated,
                "lambda_max(XA + A^T X) = " + std::to_string(top));
  return ph_from_hamiltonian(ss.A(), ss.B(), Xs, matkit::inverse(Xs));
}

namespace {

int numerical_rank(Matrix K, double tol) {
  // normalise each column so that decaying Krylov powers still count
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    double c = K.col(j).norm();
    if (c > 0.0) K.col(j) /= c;
  }
  Eigen::BDCSVD<Matrix> svd(K);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

Matrix kalman(const Matrix& A, const Matrix& B) {
  const auto n = A.rows(), m = B.cols();
  Matrix K(n, n * m);
  Matrix blk = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    K.middleCols(k * m, m) = blk;
    blk = A * blk;
    double s = blk.norm();
    if (s > 0.0) blk /= s;
  }
  return K;
}

}  // namespace

Minimality is_minimal(const StateSpace& ss, double tol) {
  Minimality out;
  out.controllable_rank = numerical_rank(kalman(ss.A(), ss.B()), tol);
  out.observable_rank = numerical_rank(kalman(ss.A().transpose(), ss.C().transpose()), tol);
  out.minimal = out.controllable_rank == ss.n() && out.observable_rank == ss.n();
  return out;
}

bool is_asymptotically_stable(const Matrix& A, double margin) {
  return matkit::spectral_abscissa(A) < -margin;
}

CMatrix transfer_eval(const StateSpace& ss, Complex s) {
  CMatrix M = -ss.A().cast<Complex>();
  M.diagonal().array() += s;
  Eigen::PartialPivLU<CMatrix> lu(M);
  if (!(lu.rcond() > 1e-14))
    throw Error(ErrorCode::kSingularResolvent, "sI - A is singular at the evaluation point");
  CMatrix X = lu.solve(ss.B().cast<Complex>());
  return ss.C().cast<Complex>() * X + ss.D().cast<Complex>();
}

double sigma_max_at(const StateSpace& ss, double omega) {
  CMatrix G = transfer_eval(ss, Complex(0.0, omega));
  Eigen::JacobiSVD<CMatrix> svd(G);
  return svd.singularValues()(0);
}

StateSpace difference(const StateSpace& g1, const StateSpace& g2) {
  check_dims(g1.m() == g2.m() && g1.p() == g2.p(), "difference needs matching in/out sizes");
  const int n1 = g1.n(), n2 = g2.n();
  Matrix A = Matrix::Zero(n1 + n2, n1 + n2);
  A.topLeftCorner(n1, n1) = g1.A();
  A.bottomRightCorner(n2, n2) = g2.A();
  Matrix B(n1 + n2, g1.m());
  B << g1.B(), g2.B();
  Matrix C(g1.p(), n1 + n2);
  C << g1.C(), -g2.C();
  return StateSpace(A, B, C, g1.D() - g2.D());
}

}  // namespace phhinf::sys
