#pragma once

#include <optional>
#include <string>

#include "phhinf/kyp.hpp"
#include "phhinf/riccati.hpp"
#include "phhinf/sys.hpp"

namespace phhinf::synth {

// x' = A x + D1 w + B u, z = E1 x + E2 u, y = C x + D2 w.
struct Weights {
  Matrix D1, D2, E1, E2;
  int ell() const { return static_cast<int>(D1.cols()); }
};

Weights classical_weights(const sys::StateSpace& ss);
// D1 D1^T = V1 and E1^T E1 = C^T C + P; IndefiniteV1 when V1 is not PSD.
Weights modified_weights(const sys::PHSystem& ph, double gamma, const Matrix& P);
Matrix v1_matrix(const sys::PHSystem& ph, double gamma, const Matrix& P);

enum class Variant { kClassical, kModified, kModifiedWithP };
const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

struct Certificate {
  double filter_residual = 0.0;
  riccati::CareMode filter_mode = riccati::CareMode::kUnverified;
  double control_residual = 0.0;
  riccati::CareMode control_mode = riccati::CareMode::kUnverified;
  std::optional<double> spectral_radius;  // rho(X Y), classical only
  std::optional<kyp::LureCertificate> lure;
  bool bound_certified = false;
};

struct Controller {
  Variant variant;
  double gamma;
  sys::StateSpace realization;  // (A_hat, B_hat, C_hat), u = -C_hat x_hat
  Matrix X;
  Matrix Y;
  Matrix P;
  Weights weights;
  std::optional<sys::PHSystem> ph;
  Certificate certificate;
};

Controller classical_hinf(const sys::StateSpace& ss, double gamma);
Controller modified_hinf(const sys::PHSystem& ph, double gamma);
Controller modified_hinf_with_P(const sys::PHSystem& ph, double gamma, const Matrix& P);
Controller synthesize(const sys::PHSystem& ph, Variant v, double gamma, const Matrix& P);

// Throws InadmissibleP unless P = 0 or P = alpha S for a KYP solution S.
void check_admissible_P(const sys::PHSystem& ph, const Matrix& P);

// Control equation of the modified variants (stabilizing solution = X).
riccati::CareProblem modified_control_problem(const sys::PHSystem& ph, double gamma,
                                              const Matrix& P);

sys::PHSystem controller_to_ph(const sys::StateSpace& ctrl, const Matrix& X);

struct ClosedLoop {
  Matrix A, D, E;
  sys::StateSpace as_state_space() const { return sys::StateSpace(A, D, E); }
};

ClosedLoop interconnect(const sys::StateSpace& plant, const sys::StateSpace& ctrl,
                        const Weights& w);

double hinf_norm(const sys::StateSpace& ss, double rel_tol = 1e-6);
double closed_loop_norm(const sys::StateSpace& plant, const Controller& c);

}  // namespace phhinf::synth
