#pragma once

#include "gsvd/types.hpp"

namespace gsvd::linalg {

/// In-place lower Cholesky of a symmetric matrix. Returns -1 on success, or
/// the index of the first nonpositive pivot. Only the lower triangle of the
/// result is meaningful.
Index cholesky_lower_inplace(Matrix& A);

/// Lower Cholesky factor of A; throws NotPositiveDefiniteError naming the
/// failing pivot.
Matrix cholesky_lower(Matrix A, const char* context);

/// Thin Householder QR: Z = Q R with Q m-by-n, R n-by-n upper triangular.
void thin_qr(const Matrix& Z, Matrix& Q, Matrix& R);

/// Largest singular value.
double spectral_norm(const Matrix& M);

/// X = L^{-1} B and X = L^{-T} B for lower-triangular L.
Matrix solve_lower(const Matrix& L, const Matrix& B);
Matrix solve_lower_transpose(const Matrix& L, const Matrix& B);

/// X = B R^{-1} for upper-triangular R.
Matrix right_solve_upper(const Matrix& B, const Matrix& R);

}  // namespace gsvd::linalg
