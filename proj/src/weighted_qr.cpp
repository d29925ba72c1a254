#include "gsvd/weighted_qr.hpp"

#include <cmath>

#include "gsvd/linalg.hpp"

namespace gsvd {

WeightedQrResult weighted_cholqr(const DenseMatrix& Z, const SpdOp& W, bool want_wq) {
  const Index m = Z.rows(), n = Z.cols();
  if (m < n) throw DimensionError("weighted_cholqr: need rows >= cols");
  if (W.dim() != m) throw DimensionError("weighted_cholqr: weight dimension mismatch");

  Matrix QZ, RZ;
  linalg::thin_qr(Z.eigen(), QZ, RZ);

  // The pre-QR would silently complete a rank-deficient Z with arbitrary
  // directions; fail loudly instead. The Gram Cholesky below backstops this.
  const double dmax = RZ.diagonal().cwiseAbs().maxCoeff();
  for (Index j = 0; j < n; ++j) {
    if (std::abs(RZ(j, j)) <= 1e-14 * dmax) {
      throw RankDeficiencyError("weighted_cholqr", j);
    }
  }

  Matrix QW(m, n);
  for (Index j = 0; j < n; ++j) QW.col(j) = W.apply(QZ.col(j));

  Matrix G = QZ.transpose() * QW;
  G = 0.5 * (G + G.transpose()).eval();

  Matrix RW = G;
  const Index bad = linalg::cholesky_lower_inplace(RW);
  if (bad >= 0) throw RankDeficiencyError("weighted_cholqr", bad);
  RW.transposeInPlace();  // upper-triangular factor, G = RW^T RW

  Matrix Q = linalg::right_solve_upper(QZ, RW);
  Matrix R = RW.triangularView<Eigen::Upper>() * RZ;

  // Sign convention: diag(R) > 0, compensated by column flips in Q (and WQ).
  WeightedQrResult res;
  if (want_wq) res.WQ = DenseMatrix(linalg::right_solve_upper(QW, RW));
  for (Index j = 0; j < n; ++j) {
    if (R(j, j) < 0) {
      Q.col(j) = -Q.col(j);
      R.row(j) = -R.row(j);
      if (res.WQ) res.WQ->eigen().col(j) = -res.WQ->eigen().col(j);
    }
  }

  // Q^T W Q = RW^{-T} G RW^{-1}; reuses the Gram matrix, no extra matvecs.
  Matrix E = linalg::right_solve_upper(
      linalg::solve_lower(Matrix(RW.transpose()), G), RW);
  res.ortho_residual_estimate =
      linalg::spectral_norm(Matrix(E - Matrix::Identity(n, n)));

  res.Q = DenseMatrix(std::move(Q));
  res.R = DenseMatrix(std::move(R));
  return res;
}

WeightedQrResult reorthogonalize(const WeightedQrResult& res, const SpdOp& W) {
  WeightedQrResult refined = weighted_cholqr(res.Q, W, res.WQ.has_value());
  refined.R = DenseMatrix(Matrix(refined.R.eigen().triangularView<Eigen::Upper>() *
                                 res.R.eigen()));
  return refined;
}

}  // namespace gsvd
