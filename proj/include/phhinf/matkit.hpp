#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phhinf/error.hpp"

namespace phhinf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

namespace matkit {

void require_finite(const Matrix& M, std::string_view what);
void require_square(const Matrix& M, std::string_view what);
void require_symmetric(const Matrix& M, double tol, std::string_view what);

enum class Region { kAll, kOpenLeft, kOpenRight };

// A = Z T Z^T. With a region, eigenvalues inside it are moved to the
// leading block and `selected` counts them.
struct SchurForm {
  Matrix Z;
  Matrix T;
  std::vector<Complex> eigenvalues;
  int selected = 0;
};

SchurForm real_schur(const Matrix& A, Region region = Region::kAll);

// Thin SVD with each left vector's largest-magnitude entry made
// nonnegative (lowest index on ties); V is flipped along with U.
struct Svd {
  Matrix U;
  Vector S;
  Matrix V;
};

Svd svd_signed(const Matrix& A);

// L with A ~ L L^T, columns = numerical rank. Pivoted Cholesky that stops
// once the remaining diagonal is below tol*|A|_F/n.
Matrix psd_factor(const Matrix& A, double tol);

Matrix solve_linear(const Matrix& A, const Matrix& B);
Matrix inverse(const Matrix& A);

std::vector<Complex> eigvals(const Matrix& A);
Vector sym_eigvals(const Matrix& S);
double lambda_min(const Matrix& S);
double lambda_max(const Matrix& S);
double spectral_abscissa(const Matrix& A);

Matrix sym(const Matrix& M);
double norm2(const Matrix& M);
double sigma_min(const Matrix& M);
double cond2(const Matrix& M);

// Lower Cholesky factor, IndefiniteMatrix unless A is SPD.
Matrix chol_lower(const Matrix& A);

// MatrixMarket dense array format, real general, column-major values.
std::string to_matrix_market(const Matrix& M);
Matrix from_matrix_market(const std::string& text);
void write_matrix_market(const std::string& path, const Matrix& M);
Matrix read_matrix_market(const std::string& path);

}  // namespace matkit
}  // namespace phhinf
