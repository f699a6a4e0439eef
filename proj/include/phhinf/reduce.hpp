#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phhinf/kyp.hpp"
#include "phhinf/sys.hpp"

namespace phhinf::reduce {

// T^-T X T^-1 = T Y T^T = diag(sigma).
struct Balanced {
  Matrix T;
  Matrix T_inv;
  Vector sigma;
};

Balanced balance_pair(const Matrix& X, const Matrix& Y);
// Same from factors X = LX LX^T, Y = LY LY^T, keeping the leading r states.
Balanced balance_factors(const Matrix& LX, const Matrix& LY, int r);

struct Reduced {
  sys::PHSystem system;
  Vector sigma;  // all balanced values, descending
};

struct BtOptions {
  const Matrix* Q_inv = nullptr;  // known Q^-1, avoids inverting an ill-conditioned Q
};

// Structure-preserving truncation of the (Q^-1, X) pair of the modified
// controller; r grows by one when sigma_r and sigma_{r+1} tie.
Reduced mhinf_bt(const sys::PHSystem& ph, double gamma, const Matrix& P, int r,
                 const BtOptions& opts = {});

sys::StateSpace classical_hinf_bt(const sys::StateSpace& ss, double gamma, int r);

struct Minimal {
  sys::PHSystem system;
  int order;
  Vector hankel;
};

Minimal minimal_realization(const sys::PHSystem& ph, double tol = 1e-12);

// error is empty when the reduction at that order failed
struct CurvePoint {
  int r;
  std::optional<double> error;
  std::string reason;
};

std::vector<CurvePoint> error_curve(const sys::PHSystem& ph, double gamma, const Matrix& P,
                                    kyp::Representation rep, const std::vector<int>& orders,
                                    const kyp::Extremal* ext = nullptr);
std::vector<CurvePoint> classical_error_curve(const sys::StateSpace& ss, double gamma,
                                              const std::vector<int>& orders);
std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace phhinf::reduce
