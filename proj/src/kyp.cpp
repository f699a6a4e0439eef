#include "phhinf/kyp.hpp"

#include <cmath>
#include <limits>

#include "phhinf/riccati.hpp"

namespace phhinf::kyp {

namespace {

void check_square_io(const sys::StateSpace& ss, const Matrix& P) {
  if (P.rows() != ss.n() || P.cols() != ss.n())
    throw Error(ErrorCode::kDimensionMismatch, "P must be n x n");
  if (ss.p() != ss.m()) throw Error(ErrorCode::kDimensionMismatch, "KYP needs p = m");
  if (ss.has_feedthrough()) throw Error(ErrorCode::kInvalidArgument, "KYP here assumes D = 0");
  matkit::require_finite(P, "P");
}

double gram_residual(const sys::StateSpace& ss, const Matrix& P) {
  return (ss.C() - ss.B().transpose() * P).norm() / std::max(ss.C().norm(), 1e-300);
}

LureCertificate build(const sys::StateSpace& ss, const Matrix& P, const Matrix* S, double tol) {
  check_square_io(ss, P);
  matkit::require_symmetric(P, 1e-10, "P");
  Matrix Ps = matkit::sym(P);
  if (!(matkit::lambda_min(Ps) > 0.0))
    throw Error(ErrorCode::kIndefiniteMatrix, "P is not positive definite");
  LureCertificate cert;
  cert.P = Ps;
  cert.gram_residual = gram_residual(ss, Ps);
  if (cert.gram_residual > tol)
    throw Error(ErrorCode::kGramMismatch, "|C - B^T P| / |C| = " + std::to_string(cert.gram_residual));
  Matrix PA = Ps * ss.A();
  Matrix N = -(PA + PA.transpose());
  if (S) N -= *S;
  try {
    cert.L = matkit::psd_factor(matkit::sym(N), tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIndefiniteMatrix)
      throw Error(ErrorCode::kDissipationViolated, e.what());
    throw;
  }
  cert.W = Matrix::Zero(cert.L.cols(), ss.m());
  if (S) cert.S = matkit::sym(*S);
  Matrix res = PA + PA.transpose() + cert.L * cert.L.transpose();
  if (S) res += *S;
  cert.dissipation_residual = res.norm() / std::max(Ps.norm() * ss.A().norm(), 1e-300);
  return cert;
}

}  // namespace

LureCertificate check_lure(const sys::StateSpace& ss, const Matrix& P, double tol) {
  return build(ss, P, nullptr, tol);
}

LureCertificate check_strong_lure(const sys::StateSpace& ss, const Matrix& P, const Matrix& S,
                                  double tol) {
  check_square_io(ss, P);
  if (S.rows() != ss.n() || S.cols() != ss.n())
    throw Error(ErrorCode::kDimensionMismatch, "S must be n x n");
  if (!sys::is_asymptotically_stable(ss.A()))
    throw Error(ErrorCode::kNotAsymptoticallyStable, "strong Lur'e needs a stable A");
  Eigen::BDCSVD<Matrix> svd(ss.B());
  const Vector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > tol * sv(0)))
    throw Error(ErrorCode::kRankDeficientB, "B does not have full column rank");
  matkit::require_symmetric(S, 1e-10, "S");
  if (!(matkit::lambda_min(S) > 0.0))
    throw Error(ErrorCode::kIndefiniteMatrix, "S is not positive definite");
  return build(ss, P, &S, tol);
}

bool verify(const sys::StateSpace& ss, const LureCertificate& cert, double tol) {
  if (cert.P.rows() != ss.n() || cert.L.rows() != ss.n()) return false;
  if (gram_residual(ss, cert.P) > tol) return false;
  Matrix PA = cert.P * ss.A();
  Matrix res = PA + PA.transpose() + cert.L * cert.L.transpose();
  if (cert.S) res += *cert.S;
  double rel = res.norm() / std::max(cert.P.norm() * ss.A().norm(), 1e-300);
  // tolerance scaled by n: the clipped tail of the factor may sit anywhere up to tol |.|_F
  return rel <= tol * std::max(1, ss.n()) && matkit::lambda_min(cert.P) > 0.0;
}

namespace {

Matrix regularised_residual(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& X,
                            double eps) {
  Matrix K = C - B.transpose() * X;
  Matrix XA = X * A;
  return XA + XA.transpose() + K.transpose() * K / eps;
}

struct Branch {
  Matrix X;
  double residual = 0.0;
};

double rel(const Matrix& F, const Matrix& X) { return F.norm() / std::max(1.0, X.norm()); }

// Stabilising (minimal) solution: Schur at a coarse eps, then Newton
// continuation down to the target.
Branch minimal_solution(const Matrix& A, const Matrix& B, const Matrix& C, double eps) {
  double e = std::max(eps, 1e-6);
  riccati::CareProblem p{A - B * C / e, -B * B.transpose() / e, C.transpose() * C / e};
  riccati::CareOptions opts;
  opts.newton_steps = 0;
  opts.residual_tol = std::numeric_limits<double>::infinity();
  Matrix X = riccati::solve_care(p, riccati::CareMode::kStabilizing, opts).X;
  double r = 0.0;
  while (true) {
    for (int it = 0; it < 12; ++it) {
      Matrix F = regularised_residual(A, B, C, X, e);
      r = rel(F, X);
      if (r < 1e-13) break;
      Matrix Ac = A - B * (C - B.transpose() * X) / e;
      X = matkit::sym(X + riccati::solve_lyapunov(Ac, F));
      matkit::require_finite(X, "Newton iterate");
    }
    r = rel(regularised_residual(A, B, C, X, e), X);
    if (e <= eps * (1.0 + 1e-9)) break;
    e = std::max(e / 10.0, eps);
  }
  if (!(r <= 1e-8)) throw Error(ErrorCode::kNonConvergence, "KYP continuation residual " + std::to_string(r));
  Matrix Ac = A - B * (C - B.transpose() * X) / eps;
  if (!sys::is_asymptotically_stable(Ac))
    throw Error(ErrorCode::kNonConvergence, "KYP continuation lost the stabilising branch");
  return {X, r};
}

Extremal solve_at(const sys::StateSpace& ss, double eps) {
  const Matrix& A = ss.A();
  const Matrix& B = ss.B();
  const Matrix& C = ss.C();
  Branch lo = minimal_solution(A, B, C, eps);
  Branch dual = minimal_solution(A.transpose(), C.transpose(), B.transpose(), eps);
  if (matkit::lambda_min(lo.X) < -1e-8 * lo.X.norm() ||
      matkit::lambda_min(dual.X) < -1e-8 * dual.X.norm())
    throw Error(ErrorCode::kNotPassivatable, "no positive semidefinite KYP solution");
  Extremal out;
  out.eps = eps;
  out.X_min = lo.X;
  out.X_max_inv = dual.X;
  // a numerically singular dual solution means X_max is unbounded at this size
  out.X_max = matkit::sym(matkit::inverse(dual.X));
  try {
    out.X_min_inv = matkit::sym(matkit::inverse(lo.X));
  } catch (const Error&) {
    out.X_min_inv.resize(0, 0);
  }
  out.residual_min = lo.residual;
  out.residual_max = rel(regularised_residual(A, B, C, out.X_max, eps), out.X_max);
  return out;
}

}  // namespace

Extremal extremal_kyp(const sys::StateSpace& ss, double eps) {
  if (ss.has_feedthrough()) throw Error(ErrorCode::kInvalidArgument, "extremal_kyp needs D = 0");
  if (ss.p() != ss.m()) throw Error(ErrorCode::kDimensionMismatch, "extremal_kyp needs p = m");
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  if (!sys::is_asymptotically_stable(ss.A()))
    throw Error(ErrorCode::kNotAsymptoticallyStable, "extremal_kyp needs a stable A");
  Extremal out;
  try {
    out = solve_at(ss, eps);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotPassivatable || e.code() == ErrorCode::kSingularMatrix) throw;
    try {
      out = solve_at(ss, eps * 1e3);
    } catch (const Error& e2) {
      if (e2.code() == ErrorCode::kImaginaryAxisEigenvalue)
        throw Error(ErrorCode::kNotPassivatable, e2.what());
      throw Error(ErrorCode::kNonConvergence, e2.what());
    }
  }
  double gap = matkit::lambda_min(out.X_max - out.X_min);
  if (gap < -1e-6 * out.X_max.norm())
    throw Error(ErrorCode::kOrderingViolated, "X_min is not below X_max");
  return out;
}

const char* to_string(Representation r) {
  switch (r) {
    case Representation::kCanonical: return "canonical";
    case Representation::kXmin: return "xmin";
    case Representation::kXmax: return "xmax";
  }
  return "canonical";
}

Representation parse_representation(const std::string& name) {
  if (name == "canonical") return Representation::kCanonical;
  if (name == "xmin") return Representation::kXmin;
  if (name == "xmax") return Representation::kXmax;
  throw Error(ErrorCode::kInvalidArgument, "unknown representation '" + name + "'");
}

sys::PHSystem representation(const sys::PHSystem& ph, Representation rep, const Extremal* ext) {
  if (rep == Representation::kCanonical) return ph;
  if (!ext) throw Error(ErrorCode::kInvalidArgument, "extremal solutions required");
  const Matrix A = ph.A();
  if (rep == Representation::kXmin) {
    if (ext->X_min_inv.size() == 0)
      throw Error(ErrorCode::kSingularMatrix, "X_min is numerically singular");
    return sys::ph_from_hamiltonian(A, ph.B(), ext->X_min, ext->X_min_inv);
  }
  return sys::ph_from_hamiltonian(A, ph.B(), ext->X_max, ext->X_max_inv);
}

}  // namespace phhinf::kyp
