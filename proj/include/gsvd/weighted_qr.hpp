#pragma once

#include <optional>

#include "gsvd/dense_matrix.hpp"
#include "gsvd/operators.hpp"

namespace gsvd {

/// Thin QR factorization Z = Q R with Q^T W Q = I.
struct WeightedQrResult {
  DenseMatrix Q;                  ///< m-by-n, W-orthonormal columns
  DenseMatrix R;                  ///< n-by-n upper triangular, positive diagonal
  std::optional<DenseMatrix> WQ;  ///< W*Q, available at no extra matvec cost
  /// ||Q^T W Q - I||_2 estimated from the Gram matrix already in hand.
  double ortho_residual_estimate = 0.0;
};

/// Weighted CholQR, stabilized: an ordinary thin QR of Z first, then the
/// Cholesky of the W-Gram matrix of that orthonormal basis.
///
///   Z = Q_Z R_Z,  Q_W = W Q_Z,  Q_Z^T Q_W = R_W^T R_W,
///   R = R_W R_Z,  Q = Q_Z R_W^{-1},  WQ = Q_W R_W^{-1}.
///
/// Costs exactly n applies of W. Column signs are flipped so diag(R) > 0,
/// which makes the factorization unique. A Cholesky breakdown of the Gram
/// matrix throws RankDeficiencyError with the failing column; callers may
/// retry after dropping trailing columns.
WeightedQrResult weighted_cholqr(const DenseMatrix& Z, const SpdOp& W, bool want_wq);

/// One refinement pass: weighted_cholqr applied to res.Q, with the R factors
/// composed so the result still factors the original Z. Costs n more applies
/// of W.
WeightedQrResult reorthogonalize(const WeightedQrResult& res, const SpdOp& W);

/// Residual threshold above which the drivers run one reorthogonalize pass.
inline constexpr double kReorthThreshold = 1e-8;

}  // namespace gsvd
