#include "phhinf/synth.hpp"

#include <algorithm>
#include <cmath>

namespace phhinf::synth {

using riccati::CareMode;
using riccati::CareProblem;

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::kInvalidArgument, "gamma must be finite and > 1");
}

Matrix pad_cols(const Matrix& F, Eigen::Index cols) {
  Matrix out = Matrix::Zero(F.rows(), cols);
  out.leftCols(std::min(cols, F.cols())) = F.leftCols(std::min(cols, F.cols()));
  return out;
}

riccati::CareSolution control_riccati(const CareProblem& p) {
  riccati::CareSolution s;
  try {
    s = riccati::solve_care(p, CareMode::kStabilizing);
  } catch (const Error& e) {
    throw Error(ErrorCode::kNoSolutionX, e.what());
  }
  if (s.mode != CareMode::kStabilizing)
    throw Error(ErrorCode::kNoSolutionX, "control Riccati solution is not stabilizing");
  return s;
}

CareMode closure_mode(const CareProblem& p, const Matrix& X) {
  return sys::is_asymptotically_stable(p.A - p.G * X) ? CareMode::kStabilizing
                                                       : CareMode::kUnverified;
}

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kClassical: return "classical";
    case Variant::kModified: return "modified";
    case Variant::kModifiedWithP: return "modified-with-P";
  }
  return "classical";
}

Variant parse_variant(const std::string& name) {
  if (name == "classical") return Variant::kClassical;
  if (name == "modified" || name == "mhinf") return Variant::kModified;
  if (name == "modified-with-P" || name == "modified-with-p" || name == "mhinf-p")
    return Variant::kModifiedWithP;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + name + "'");
}

Weights classical_weights(const sys::StateSpace& ss) {
  const int n = ss.n(), m = ss.m(), p = ss.p();
  if (p != m) throw Error(ErrorCode::kDimensionMismatch, "weights need p = m");
  Weights w;
  w.D1 = Matrix::Zero(n, n + m);
  w.D1.leftCols(m) = ss.B();
  w.D2 = Matrix::Zero(m, n + m);
  w.D2.rightCols(m) = Matrix::Identity(m, m);
  w.E1 = Matrix::Zero(n + m, n);
  w.E1.topRows(p) = ss.C();
  w.E2 = Matrix::Zero(n + m, m);
  w.E2.bottomRows(m) = Matrix::Identity(m, m);
  return w;
}

Matrix v1_matrix(const sys::PHSystem& ph, double gamma, const Matrix& P) {
  const double g2 = 1.0 / (gamma * gamma);
  Matrix V1 = 2.0 * ph.R() + (1.0 - g2) * ph.B() * ph.B().transpose();
  if (P.size() != 0 && !P.isZero(0.0)) {
    Matrix Qi = matkit::inverse(ph.Q());
    V1 -= g2 * Qi * P * Qi;
  }
  return matkit::sym(V1);
}

Weights modified_weights(const sys::PHSystem& ph, double gamma, const Matrix& P) {
  check_gamma(gamma);
  const int n = ph.n(), m = ph.m();
  Matrix V1 = v1_matrix(ph, gamma, P);
  Matrix F1;
  try {
    F1 = matkit::psd_factor(V1, 1e-10);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIndefiniteMatrix)
      throw Error(ErrorCode::kIndefiniteV1, "lambda_min(V1) = " +
                                                std::to_string(matkit::lambda_min(V1)));
    throw;
  }
  Matrix C = ph.C();
  Matrix CC = C.transpose() * C;
  if (P.size() != 0) CC += P;
  Matrix F2 = matkit::psd_factor(matkit::sym(CC), 1e-10);
  Weights w;
  w.D1 = Matrix::Zero(n, n + m);
  w.D1.leftCols(n) = pad_cols(F1, n);
  w.D2 = Matrix::Zero(m, n + m);
  w.D2.rightCols(m) = Matrix::Identity(m, m);
  w.E1 = Matrix::Zero(n + m, n);
  w.E1.topRows(n) = pad_cols(F2, n).transpose();
  w.E2 = Matrix::Zero(n + m, m);
  w.E2.bottomRows(m) = Matrix::Identity(m, m);
  return w;
}

Controller classical_hinf(const sys::StateSpace& ss, double gamma) {
  check_gamma(gamma);
  if (ss.p() != ss.m()) throw Error(ErrorCode::kDimensionMismatch, "classical_hinf needs p = m");
  const double g2 = 1.0 / (gamma * gamma), g = 1.0 - g2;
  const Matrix& A = ss.A();
  const Matrix& B = ss.B();
  const Matrix& C = ss.C();
  const int n = ss.n();
  Matrix BB = B * B.transpose(), CC = C.transpose() * C;

  CareProblem px{A, g * BB, CC};
  CareProblem py{A.transpose(), g * CC, BB};
  riccati::CareSolution sx = control_riccati(px);
  riccati::CareSolution sy;
  try {
    sy = riccati::solve_care(py, CareMode::kStabilizing);
  } catch (const Error& e) {
    throw Error(ErrorCode::kNoSolutionX, std::string("filter Riccati: ") + e.what());
  }
  if (sy.mode != CareMode::kStabilizing)
    throw Error(ErrorCode::kNoSolutionX, "filter Riccati solution is not stabilizing");

  double rho = 0.0;
  for (const Complex& l : matkit::eigvals(sx.X * sy.X)) rho = std::max(rho, std::abs(l));
  if (rho >= gamma * gamma * (1.0 - 1e-10))
    throw Error(ErrorCode::kSpectralRadiusTooLarge,
                "rho(XY) = " + std::to_string(rho) + " >= gamma^2");

  Matrix Z = matkit::inverse(Matrix::Identity(n, n) - g2 * sy.X * sx.X);
  Matrix Ch = B.transpose() * sx.X * Z;
  Matrix Ah = A - g * sy.X * CC - BB * sx.X * Z;
  Matrix Bh = sy.X * C.transpose();

  Controller c{Variant::kClassical, gamma, sys::StateSpace(Ah, Bh, Ch), sx.X, sy.X,
               Matrix::Zero(n, n), classical_weights(ss), std::nullopt, {}};
  c.certificate.filter_residual = sy.residual;
  c.certificate.filter_mode = sy.mode;
  c.certificate.control_residual = sx.residual;
  c.certificate.control_mode = sx.mode;
  c.certificate.spectral_radius = rho;
  c.certificate.bound_certified = true;
  return c;
}

void check_admissible_P(const sys::PHSystem& ph, const Matrix& P) {
  const int n = ph.n();
  if (P.rows() != n || P.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "P must be n x n");
  matkit::require_finite(P, "P");
  if (P.isZero(0.0)) return;
  if ((P - P.transpose()).norm() > 1e-10 * P.norm())
    throw Error(ErrorCode::kInadmissibleP, "P is not symmetric");
  Matrix Ps = matkit::sym(P);
  if (matkit::lambda_min(Ps) < -1e-10 * Ps.norm())
    throw Error(ErrorCode::kInadmissibleP, "P is not positive semidefinite");
  // P = alpha S with S solving the KYP inequality of the plant
  Matrix C = ph.C();
  Matrix BP = ph.B().transpose() * Ps;
  double alpha = (BP.array() * C.array()).sum() / C.squaredNorm();
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInadmissibleP, "B^T P is not aligned with C");
  if ((BP - alpha * C).norm() > 1e-2 * alpha * C.norm())
    throw Error(ErrorCode::kInadmissibleP, "B^T P is not a multiple of C");
  Matrix PA = Ps * ph.A();
  if (matkit::lambda_max(PA + PA.transpose()) > 1e-8 * PA.norm())
    throw Error(ErrorCode::kInadmissibleP, "P A + A^T P is not negative semidefinite");
}

namespace {

Controller modified_impl(const sys::PHSystem& ph, double gamma, const Matrix& P, bool with_P) {
  check_gamma(gamma);
  const int n = ph.n();
  const double g2 = 1.0 / (gamma * gamma), g = 1.0 - g2;
  const Matrix A = ph.A();
  const Matrix& B = ph.B();
  const Matrix C = ph.C();
  Matrix BB = B * B.transpose(), CC = C.transpose() * C;
  Matrix Qi = matkit::sym(matkit::inverse(ph.Q()));

  Weights w = modified_weights(ph, gamma, P);

  // the filter solution is Q^-1; it is only checked
  Matrix QPQ = Qi * P * Qi;
  CareProblem py{A.transpose(), g * CC - g2 * P, g * BB + 2.0 * ph.R() - g2 * QPQ};
  py.G = matkit::sym(py.G);
  py.H = matkit::sym(py.H);
  double filter_res = riccati::care_relative_residual(py, Qi);
  if (!(filter_res <= 1e-8))
    throw Error(ErrorCode::kResidualTooLarge, "filter residual " + std::to_string(filter_res));
  CareMode filter_mode = with_P ? CareMode::kUnverified : closure_mode(py, Qi);

  riccati::CareSolution sx = control_riccati(modified_control_problem(ph, gamma, P));

  Matrix Ah = A - g * B * C - BB * sx.X + g2 * Qi * P;
  Matrix Ch = B.transpose() * sx.X;
  sys::StateSpace ctrl(Ah, B, Ch);

  Controller c{with_P ? Variant::kModifiedWithP : Variant::kModified,
               gamma, ctrl, sx.X, Qi, P, w, std::nullopt, {}};
  c.ph = controller_to_ph(ctrl, sx.X);
  c.certificate.filter_residual = filter_res;
  c.certificate.filter_mode = filter_mode;
  c.certificate.control_residual = sx.residual;
  c.certificate.control_mode = sx.mode;
  try {
    c.certificate.lure = with_P ? kyp::check_strong_lure(ctrl, sx.X, P, 1e-8)
                                : kyp::check_lure(ctrl, sx.X, 1e-8);
  } catch (const Error& e) {
    throw Error(ErrorCode::kPhVerificationFailed, e.what());
  }
  c.certificate.bound_certified =
      filter_mode == CareMode::kStabilizing && sx.mode == CareMode::kStabilizing;
  return c;
}

}  // namespace

CareProblem modified_control_problem(const sys::PHSystem& ph, double gamma, const Matrix& P) {
  const double g2 = 1.0 / (gamma * gamma);
  const Matrix C = ph.C();
  Matrix A = ph.A() + g2 * ph.B() * C;
  Matrix H = C.transpose() * C;
  if (P.size() != 0 && !P.isZero(0.0)) {
    A += g2 * matkit::solve_linear(ph.Q(), P);
    H += P;
  }
  return {A, (1.0 - g2) * ph.B() * ph.B().transpose(), matkit::sym(H)};
}

Controller modified_hinf(const sys::PHSystem& ph, double gamma) {
  return modified_impl(ph, gamma, Matrix::Zero(ph.n(), ph.n()), false);
}

Controller modified_hinf_with_P(const sys::PHSystem& ph, double gamma, const Matrix& P) {
  check_gamma(gamma);
  check_admissible_P(ph, P);
  if (P.isZero(0.0)) return modified_hinf(ph, gamma);
  return modified_impl(ph, gamma, matkit::sym(P), true);
}

Controller synthesize(const sys::PHSystem& ph, Variant v, double gamma, const Matrix& P) {
  switch (v) {
    case Variant::kClassical: return classical_hinf(sys::ph_to_ss(ph), gamma);
    case Variant::kModified: return modified_hinf(ph, gamma);
    case Variant::kModifiedWithP: return modified_hinf_with_P(ph, gamma, P);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant");
}

sys::PHSystem controller_to_ph(const sys::StateSpace& ctrl, const Matrix& X) {
  try {
    return sys::ss_to_ph(ctrl, X, 1e-8);
  } catch (const Error& e) {
    throw Error(ErrorCode::kPhVerificationFailed, e.what());
  }
}

ClosedLoop interconnect(const sys::StateSpace& plant, const sys::StateSpace& ctrl,
                        const Weights& w) {
  const int n = plant.n(), nc = ctrl.n();
  if (ctrl.p() != plant.m() || ctrl.m() != plant.p())
    throw Error(ErrorCode::kDimensionMismatch, "controller does not fit the plant");
  if (w.D1.rows() != n || w.E1.cols() != n || w.D2.rows() != plant.p() ||
      w.E2.cols() != plant.m() || w.D2.cols() != w.D1.cols() || w.E2.rows() != w.E1.rows())
    throw Error(ErrorCode::kDimensionMismatch, "weights do not fit the plant");
  ClosedLoop cl;
  cl.A.resize(n + nc, n + nc);
  cl.A << plant.A(), -plant.B() * ctrl.C(), ctrl.B() * plant.C(), ctrl.A();
  cl.D.resize(n + nc, w.D1.cols());
  cl.D << w.D1, ctrl.B() * w.D2;
  cl.E.resize(w.E1.rows(), n + nc);
  cl.E << w.E1, -w.E2 * ctrl.C();
  return cl;
}

namespace {

double sigma_at(const Matrix& A, const Matrix& B, const Matrix& C, double w) {
  CMatrix M = -A.cast<Complex>();
  M.diagonal().array() += Complex(0.0, w);
  CMatrix G = C.cast<Complex>() * M.partialPivLu().solve(B.cast<Complex>());
  Eigen::JacobiSVD<CMatrix> svd(G);
  return svd.singularValues()(0);
}

std::vector<double> axis_frequencies(const Matrix& A, const Matrix& BB, const Matrix& CC,
                                     double gamma) {
  const Eigen::Index n = A.rows();
  Matrix H(2 * n, 2 * n);
  H << A, BB / (gamma * gamma), -CC, -A.transpose();
  std::vector<double> ws;
  for (const Complex& l : matkit::eigvals(H))
    if (std::abs(l.real()) <= 1e-8 * std::max(1.0, std::abs(l)) && l.imag() >= 0.0)
      ws.push_back(l.imag());
  std::sort(ws.begin(), ws.end());
  return ws;
}

}  // namespace

double hinf_norm(const sys::StateSpace& ss, double rel_tol) {
  if (ss.has_feedthrough()) throw Error(ErrorCode::kInvalidArgument, "hinf_norm assumes D = 0");
  const Matrix& A = ss.A();
  const Matrix& B = ss.B();
  const Matrix& C = ss.C();
  std::vector<Complex> poles = matkit::eigvals(A);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (const Complex& l : poles) abscissa = std::max(abscissa, l.real());
  if (!(abscissa < 0.0)) throw Error(ErrorCode::kUnstableSystem, "A is not Hurwitz");

  double lb = sigma_at(A, B, C, 0.0);
  for (const Complex& l : poles) {
    lb = std::max(lb, sigma_at(A, B, C, std::abs(l.imag())));
    lb = std::max(lb, sigma_at(A, B, C, std::abs(l)));
  }
  const double nb = matkit::norm2(B), nc = matkit::norm2(C);
  if (nb == 0.0 || nc == 0.0) return 0.0;
  Matrix BB = B * B.transpose(), CC = C.transpose() * C;

  double ub = std::max(2.0 * nb * nc / std::abs(abscissa), lb * (1.0 + 2.0 * rel_tol));
  for (int k = 0; !axis_frequencies(A, BB, CC, ub).empty(); ++k) {
    if (k > 200) throw Error(ErrorCode::kNonConvergence, "no H-infinity upper bound found");
    ub *= 2.0;
  }
  if (lb == 0.0) lb = ub * 1e-300;
  for (int it = 0; ub - lb > rel_tol * ub; ++it) {
    if (it > 500) throw Error(ErrorCode::kNonConvergence, "H-infinity bisection stalled");
    double g = std::sqrt(lb * ub);
    std::vector<double> ws = axis_frequencies(A, BB, CC, g);
    if (ws.empty()) {
      ub = g;
      continue;
    }
    double best = g;
    for (double w : ws) best = std::max(best, sigma_at(A, B, C, w));
    for (size_t i = 0; i + 1 < ws.size(); ++i)
      best = std::max(best, sigma_at(A, B, C, 0.5 * (ws[i] + ws[i + 1])));
    if (best >= ub) return best;
    lb = std::max(lb, best);
  }
  return ub;
}

double closed_loop_norm(const sys::StateSpace& plant, const Controller& c) {
  return hinf_norm(interconnect(plant, c.realization, c.weights).as_state_space());
}

}  // namespace phhinf::synth
