#pragma once

#include <string>

#include "phhinf/matkit.hpp"

namespace phhinf::sys {

// x' = A x + B u, y = C x + D u.
class StateSpace {
 public:
  StateSpace(Matrix A, Matrix B, Matrix C, Matrix D);
  StateSpace(Matrix A, Matrix B, Matrix C);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Matrix& D() const { return D_; }
  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }
  int p() const { return static_cast<int>(C_.rows()); }
  bool has_feedthrough() const { return !D_.isZero(0.0); }

 private:
  Matrix A_, B_, C_, D_;
};

// x' = (J - R) Q x + B u, y = B^T Q x.
class PHSystem {
 public:
  static constexpr double kTol = 1e-10;

  PHSystem(Matrix J, Matrix R, Matrix Q, Matrix B);

  const Matrix& J() const { return J_; }
  const Matrix& R() const { return R_; }
  const Matrix& Q() const { return Q_; }
  const Matrix& B() const { return B_; }
  int n() const { return static_cast<int>(J_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }

  Matrix A() const { return (J_ - R_) * Q_; }
  Matrix C() const { return B_.transpose() * Q_; }

 private:
  Matrix J_, R_, Q_, B_;
};

StateSpace ph_to_ss(const PHSystem& ph);

// Needs C = B^T X (relative tol) and X A + A^T X <= 0 (relative tol).
PHSystem ss_to_ph(const StateSpace& ss, const Matrix& X, double tol = 1e-8);

// (J, R, Q, B) for a given X and its inverse, without checking C = B^T X.
// J and R come from A X^-1 and are exactly skew / symmetric.
PHSystem ph_from_hamiltonian(const Matrix& A, const Matrix& B, const Matrix& X,
                             const Matrix& X_inv);

struct Minimality {
  bool minimal = false;
  int controllable_rank = 0;
  int observable_rank = 0;
};

Minimality is_minimal(const StateSpace& ss, double tol = 1e-10);
bool is_asymptotically_stable(const Matrix& A, double margin = 0.0);

CMatrix transfer_eval(const StateSpace& ss, Complex s);
double sigma_max_at(const StateSpace& ss, double omega);

// Stacks G1 - G2 (same inputs and outputs).
StateSpace difference(const StateSpace& g1, const StateSpace& g2);

}  // namespace phhinf::sys
