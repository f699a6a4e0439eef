#pragma once

#include <optional>

#include "phhinf/sys.hpp"

namespace phhinf::kyp {

// P A + A^T P = -L L^T (- S when strong), C = B^T P.
struct LureCertificate {
  Matrix P;
  Matrix L;
  Matrix W;  // zero: D = 0 throughout
  std::optional<Matrix> S;
  double gram_residual = 0.0;         // |C - B^T P|_F / |C|_F
  double dissipation_residual = 0.0;  // |P A + A^T P + L L^T (+ S)|_F / (|P|_F |A|_F)
  bool strong() const { return S.has_value(); }
};

LureCertificate check_lure(const sys::StateSpace& ss, const Matrix& P, double tol = 1e-8);
LureCertificate check_strong_lure(const sys::StateSpace& ss, const Matrix& P, const Matrix& S,
                                  double tol = 1e-8);

// Recomputes both residuals of an existing certificate against ss.
bool verify(const sys::StateSpace& ss, const LureCertificate& cert, double tol = 1e-8);

struct Extremal {
  Matrix X_min;
  Matrix X_max;
  Matrix X_min_inv;
  Matrix X_max_inv;
  double eps = 0.0;  // regularisation actually used
  double residual_min = 0.0;
  double residual_max = 0.0;
};

// Extremal solutions of the passivity KYP inequality, from the regularised
// Riccati equation X A + A^T X + (C - B^T X)^T (C - B^T X) / eps = 0.
Extremal extremal_kyp(const sys::StateSpace& ss, double eps = 1e-12);

enum class Representation { kCanonical, kXmin, kXmax };
const char* to_string(Representation r);
Representation parse_representation(const std::string& name);

// The same input/output behaviour written with Hamiltonian X (C := B^T X).
sys::PHSystem representation(const sys::PHSystem& ph, Representation rep, const Extremal* ext);

}  // namespace phhinf::kyp
