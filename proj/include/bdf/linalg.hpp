#pragma once

// Dense Hermitian helpers shared by state, scf and dynamics.

#include <Eigen/Dense>
#include <functional>

namespace bdf::linalg {

using Matrix = Eigen::MatrixXcd;

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;
};

/// Uses the lower triangle only.
HermitianEigen eigh(const Matrix& h);
Eigen::VectorXd eigvalsh(const Matrix& h);

/// V f(Λ) V† for a Hermitian matrix with decomposition `e`.
Matrix apply_function(const HermitianEigen& e, const std::function<std::complex<double>(double)>& f);

/// exp(−i t H) for Hermitian H.
Matrix unitary_exp(const HermitianEigen& e, double t);

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
double hermitian_norm(const Matrix& h);

/// Operator norm of an arbitrary square matrix, sqrt of the top eigenvalue of A†A.
double operator_norm(const Matrix& a);

/// Sum of singular values.
double trace_norm(const Matrix& a);

/// max |A − A†|.
double hermiticity_defect(const Matrix& a);

}  // namespace bdf::linalg
