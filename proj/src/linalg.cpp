#include "bdf/linalg.hpp"

#include <lapacke.h>

#include <stdexcept>
#include <string>

namespace bdf::linalg {

namespace {

// Divide-and-conquer Hermitian eigensolver; overwrites `a` with eigenvectors
// when jobz = 'V'.
Eigen::VectorXd heevd(Matrix& a, char jobz) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                         w.data());
  if (info != 0) throw std::runtime_error("zheevd failed with info " + std::to_string(info));
  return w;
}

}  // namespace

HermitianEigen eigh(const Matrix& h) {
  Matrix v = h;
  auto w = heevd(v, 'V');
  return {std::move(w), std::move(v)};
}

Eigen::VectorXd eigvalsh(const Matrix& h) {
  Matrix work = h;
  return heevd(work, 'N');
}

Matrix apply_function(const HermitianEigen& e,
                      const std::function<std::complex<double>(double)>& f) {
  Eigen::VectorXcd d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = f(e.values[i]);
  return e.vectors * d.asDiagonal() * e.vectors.adjoint();
}

Matrix unitary_exp(const HermitianEigen& e, double t) {
  return apply_function(e, [t](double x) { return std::polar(1.0, -t * x); });
}

double hermitian_norm(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  return eigvalsh(h).cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix g = a.adjoint() * a;
  return std::sqrt(std::max(0.0, eigvalsh(g).maxCoeff()));
}

double trace_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double hermiticity_defect(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace bdf::linalg
