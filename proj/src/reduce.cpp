#include "phhinf/reduce.hpp"

#include <cmath>
#include <cstdio>

#include "phhinf/riccati.hpp"
#include "phhinf/synth.hpp"

namespace phhinf::reduce {

namespace {

Matrix factor_of(const Matrix& M) {
  try {
    return matkit::chol_lower(M);
  } catch (const Error&) {
    return matkit::psd_factor(matkit::sym(M), 1e-14);
  }
}

// Lower factor of Q^-1 from the Cholesky factor of Q.
Matrix inverse_factor(const Matrix& Q) {
  Matrix LQ = matkit::chol_lower(Q);
  Matrix Linv = LQ.triangularView<Eigen::Lower>().solve(Matrix::Identity(Q.rows(), Q.cols()));
  return Linv.transpose();
}

int with_ties(const Vector& s, int r) {
  while (r < s.size() && std::abs(s(r - 1) - s(r)) <= 1e-10 * s(r - 1)) ++r;
  return r;
}

sys::PHSystem truncate_ph(const sys::PHSystem& ph, const Balanced& b) {
  const Matrix& T = b.T;
  Matrix J = T * ph.J() * T.transpose();
  Matrix R = T * ph.R() * T.transpose();
  Matrix Q = b.T_inv.transpose() * ph.Q() * b.T_inv;
  return sys::PHSystem(0.5 * (J - J.transpose()), matkit::sym(R), matkit::sym(Q), T * ph.B());
}

struct Factors {
  Matrix LX, LY;
};

Factors mhinf_factors(const sys::PHSystem& ph, double gamma, const Matrix& P,
                      const BtOptions& opts) {
  riccati::CareProblem cp = synth::modified_control_problem(ph, gamma, P);
  riccati::CareSolution s = riccati::solve_care(cp, riccati::CareMode::kStabilizing);
  if (s.mode != riccati::CareMode::kStabilizing)
    throw Error(ErrorCode::kNoSolutionX, "control Riccati solution is not stabilizing");
  // X solves the Lyapunov equation of its closure, so its factor comes out directly
  const double g = 1.0 - 1.0 / (gamma * gamma);
  Matrix H = matkit::psd_factor(cp.H, 1e-14);
  Matrix F(ph.n(), H.cols() + ph.m());
  F << H, std::sqrt(g) * s.X * ph.B();
  Factors f;
  f.LX = riccati::lyapunov_cholesky(cp.A - cp.G * s.X, F);
  f.LY = opts.Q_inv ? factor_of(*opts.Q_inv) : inverse_factor(ph.Q());
  return f;
}

Vector values_of(const Matrix& LX, const Matrix& LY) {
  return matkit::svd_signed(LX.transpose() * LY).S;
}

Reduced truncate_from(const sys::PHSystem& ph, const Factors& f, int r) {
  Vector s = values_of(f.LX, f.LY);
  r = with_ties(s, r);
  Balanced b = balance_factors(f.LX, f.LY, r);
  return {truncate_ph(ph, b), b.sigma};
}

void check_order(int r, int n, int m) {
  if (r < 1 || r > n) throw Error(ErrorCode::kInvalidArgument, "order must be in [1, n]");
  if (r < m) throw Error(ErrorCode::kInvalidArgument, "order must be at least the input count");
}

}  // namespace

Balanced balance_factors(const Matrix& LX, const Matrix& LY, int r) {
  if (LX.rows() != LY.rows()) throw Error(ErrorCode::kDimensionMismatch, "factor sizes differ");
  matkit::Svd svd = matkit::svd_signed(LX.transpose() * LY);
  const Vector& s = svd.S;
  if (r < 1 || r > s.size()) throw Error(ErrorCode::kInvalidArgument, "bad balancing order");
  if (!(s(r - 1) > 1e-14 * s(0)))
    throw Error(ErrorCode::kNearSingularGramian,
                "sigma_r / sigma_1 = " + std::to_string(s(r - 1) / s(0)));
  Vector is = s.head(r).array().rsqrt();
  Balanced b;
  b.T = is.asDiagonal() * svd.U.leftCols(r).transpose() * LX.transpose();
  b.T_inv = LY * svd.V.leftCols(r) * is.asDiagonal();
  b.sigma = s;
  return b;
}

Balanced balance_pair(const Matrix& X, const Matrix& Y) {
  matkit::require_square(X, "X");
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw Error(ErrorCode::kDimensionMismatch, "X and Y must have equal size");
  Matrix LX = factor_of(X), LY = factor_of(Y);
  if (LX.cols() < X.rows() || LY.cols() < Y.rows())
    throw Error(ErrorCode::kNearSingularGramian, "X or Y is singular");
  return balance_factors(LX, LY, static_cast<int>(X.rows()));
}

Reduced mhinf_bt(const sys::PHSystem& ph, double gamma, const Matrix& P, int r,
                 const BtOptions& opts) {
  check_order(r, ph.n(), ph.m());
  Matrix Pm = P.size() == 0 ? Matrix::Zero(ph.n(), ph.n()) : P;
  if (!Pm.isZero(0.0)) synth::check_admissible_P(ph, Pm);
  return truncate_from(ph, mhinf_factors(ph, gamma, Pm, opts), r);
}

namespace {

struct ClassicalFactors {
  Matrix LX, LY;
};

ClassicalFactors classical_factors(const sys::StateSpace& ss, double gamma) {
  const double g = 1.0 - 1.0 / (gamma * gamma);
  const Matrix& A = ss.A();
  const Matrix& B = ss.B();
  const Matrix& C = ss.C();
  riccati::CareProblem px{A, g * B * B.transpose(), C.transpose() * C};
  riccati::CareProblem py{A.transpose(), g * C.transpose() * C, B * B.transpose()};
  riccati::CareSolution sx = riccati::solve_care(px), sy = riccati::solve_care(py);
  if (sx.mode != riccati::CareMode::kStabilizing || sy.mode != riccati::CareMode::kStabilizing)
    throw Error(ErrorCode::kNoSolutionX, "classical Riccati solutions are not stabilizing");
  Matrix FX(ss.n(), ss.p() + ss.m()), FY(ss.n(), ss.m() + ss.p());
  FX << C.transpose(), std::sqrt(g) * sx.X * B;
  FY << B, std::sqrt(g) * sy.X * C.transpose();
  return {riccati::lyapunov_cholesky(px.A - px.G * sx.X, FX),
          riccati::lyapunov_cholesky(py.A - py.G * sy.X, FY)};
}

sys::StateSpace truncate_ss(const sys::StateSpace& ss, const ClassicalFactors& f, int r) {
  r = with_ties(values_of(f.LX, f.LY), r);
  Balanced b = balance_factors(f.LX, f.LY, r);
  return sys::StateSpace(b.T * ss.A() * b.T_inv, b.T * ss.B(), ss.C() * b.T_inv);
}

}  // namespace

sys::StateSpace classical_hinf_bt(const sys::StateSpace& ss, double gamma, int r) {
  check_order(r, ss.n(), ss.m());
  if (!(gamma > 1.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be > 1");
  return truncate_ss(ss, classical_factors(ss, gamma), r);
}

Minimal minimal_realization(const sys::PHSystem& ph, double tol) {
  const Matrix A = ph.A();
  if (!sys::is_asymptotically_stable(A))
    throw Error(ErrorCode::kNotAsymptoticallyStable, "minimal_realization needs a stable A");
  Matrix Lc = riccati::lyapunov_cholesky(A.transpose(), ph.B());
  Matrix Lo = riccati::lyapunov_cholesky(A, ph.C().transpose());
  Vector hsv = values_of(Lo, Lc);
  int r = 0;
  while (r < hsv.size() && hsv(r) > tol * hsv(0)) ++r;
  r = std::max(r, ph.m());
  Balanced b = balance_factors(Lo, inverse_factor(ph.Q()), r);
  return {truncate_ph(ph, b), r, hsv};
}

std::vector<CurvePoint> error_curve(const sys::PHSystem& ph, double gamma, const Matrix& P,
                                    kyp::Representation rep, const std::vector<int>& orders,
                                    const kyp::Extremal* ext) {
  sys::PHSystem rs = kyp::representation(ph, rep, ext);
  Matrix Pm = P.size() == 0 ? Matrix::Zero(ph.n(), ph.n()) : P;
  if (!Pm.isZero(0.0)) synth::check_admissible_P(rs, Pm);
  BtOptions opts;
  if (rep == kyp::Representation::kXmin) opts.Q_inv = &ext->X_min_inv;
  if (rep == kyp::Representation::kXmax) opts.Q_inv = &ext->X_max_inv;
  Factors f = mhinf_factors(rs, gamma, Pm, opts);
  sys::StateSpace full = sys::ph_to_ss(rs);
  std::vector<CurvePoint> out;
  for (int r : orders) {
    try {
      check_order(r, ph.n(), ph.m());
      Reduced red = truncate_from(rs, f, r);
      out.push_back({r, synth::hinf_norm(sys::difference(full, sys::ph_to_ss(red.system))), ""});
    } catch (const Error& e) {
      out.push_back({r, std::nullopt, e.what()});
    }
  }
  return out;
}

std::vector<CurvePoint> classical_error_curve(const sys::StateSpace& ss, double gamma,
                                              const std::vector<int>& orders) {
  ClassicalFactors f = classical_factors(ss, gamma);
  std::vector<CurvePoint> out;
  for (int r : orders) {
    try {
      check_order(r, ss.n(), ss.m());
      out.push_back({r, synth::hinf_norm(sys::difference(ss, truncate_ss(ss, f, r))), ""});
    } catch (const Error& e) {
      out.push_back({r, std::nullopt, e.what()});
    }
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "r,error\n";
  char buf[64];
  for (const CurvePoint& p : curve) {
    if (!p.error) continue;
    std::snprintf(buf, sizeof buf, "%d,%.15e\n", p.r, *p.error);
    out += buf;
  }
  return out;
}

}  // namespace phhinf::reduce
