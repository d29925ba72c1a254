#include "gsvd/linalg.hpp"

#include <cmath>

namespace gsvd::linalg {

Index cholesky_lower_inplace(Matrix& A) {
  const Index n = A.rows();
  for (Index j = 0; j < n; ++j) {
    double d = A(j, j);
    for (Index k = 0; k < j; ++k) d -= A(j, k) * A(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return j;
    const double ljj = std::sqrt(d);
    A(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (Index k = 0; k < j; ++k) s -= A(i, k) * A(j, k);
      A(i, j) = s / ljj;
    }
  }
  // zero the strict upper triangle so the factor can be used directly
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) A(i, j) = 0.0;
  return -1;
}

Matrix cholesky_lower(Matrix A, const char* context) {
  const Index bad = cholesky_lower_inplace(A);
  if (bad >= 0) throw NotPositiveDefiniteError(context, bad);
  return A;
}

void thin_qr(const Matrix& Z, Matrix& Q, Matrix& R) {
  const Index m = Z.rows(), n = Z.cols();
  Eigen::HouseholderQR<Matrix> qr(Z);
  Q = qr.householderQ() * Matrix::Identity(m, n);
  R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
}

double spectral_norm(const Matrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  return Eigen::BDCSVD<Matrix>(M).singularValues()(0);
}

Matrix solve_lower(const Matrix& L, const Matrix& B) {
  return L.triangularView<Eigen::Lower>().solve(B);
}

Matrix solve_lower_transpose(const Matrix& L, const Matrix& B) {
  return L.triangularView<Eigen::Lower>().transpose().solve(B);
}

Matrix right_solve_upper(const Matrix& B, const Matrix& R) {
  // X R = B  <=>  R^T X^T = B^T
  return R.triangularView<Eigen::Upper>().transpose().solve(Matrix(B.transpose())).transpose();
}

}  // namespace gsvd::linalg
