#include "gsvd/reference.hpp"

#include <cmath>

#include "gsvd/linalg.hpp"

namespace gsvd {

namespace {

void check_oracle_size(Index m, Index n) {
  if (m > kOracleSizeCap || n > kOracleSizeCap) {
    throw std::invalid_argument("reference oracle: refusing size beyond " +
                                std::to_string(kOracleSizeCap));
  }
}

}  // namespace

ExactGsvd exact_gsvd(const DenseMatrix& A, const DenseMatrix& S, const DenseMatrix& T) {
  const Index m = A.rows(), n = A.cols();
  check_oracle_size(m, n);
  if (S.rows() != m || S.cols() != m || T.rows() != n || T.cols() != n) {
    throw DimensionError("exact_gsvd: weight dimensions do not match A");
  }
  const Matrix LS = linalg::cholesky_lower(
      0.5 * (S.eigen() + S.eigen().transpose()), "exact_gsvd(S)");
  const Matrix LT = linalg::cholesky_lower(
      0.5 * (T.eigen() + T.eigen().transpose()), "exact_gsvd(T)");

  // L_S^T A L_T^{-T}: right factor through a transposed lower solve
  const Matrix X = linalg::solve_lower(LT, Matrix(A.eigen().transpose())).transpose();
  const Matrix B = LS.transpose() * X;

  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ExactGsvd out;
  out.sigma = svd.singularValues();
  out.U = DenseMatrix(linalg::solve_lower_transpose(LS, Matrix(svd.matrixU())));
  out.V = DenseMatrix(linalg::solve_lower_transpose(LT, Matrix(svd.matrixV())));
  return out;
}

SandwichReport singular_value_sandwich_check(const DenseMatrix& A, const DenseMatrix& S,
                                             const DenseMatrix& T) {
  const ExactGsvd g = exact_gsvd(A, S, T);
  const Vector s = Eigen::BDCSVD<Matrix>(A.eigen()).singularValues();

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S.eigen() + S.eigen().transpose()));
  Eigen::SelfAdjointEigenSolver<Matrix> et(0.5 * (T.eigen() + T.eigen().transpose()));
  const double s_max = es.eigenvalues().maxCoeff(), s_min = es.eigenvalues().minCoeff();
  const double t_max = et.eigenvalues().maxCoeff(), t_min = et.eigenvalues().minCoeff();

  SandwichReport rep;
  const Index r = g.sigma.size();
  rep.sigma = g.sigma;
  rep.lower = s.head(r) / std::sqrt(t_max / s_min);   // s_j / sqrt(||S^{-1}|| ||T||)
  rep.upper = s.head(r) * std::sqrt(s_max / t_min);   // sqrt(||S|| ||T^{-1}||) s_j
  rep.passed = true;
  const double slack = 1e-12 * (r > 0 ? g.sigma(0) : 0.0);
  for (Index j = 0; j < r; ++j) {
    if (rep.lower(j) > g.sigma(j) + slack || g.sigma(j) > rep.upper(j) + slack) {
      rep.passed = false;
      rep.first_violation = j;
      break;
    }
  }
  return rep;
}

ExactGheig exact_gheig(const DenseMatrix& A, const DenseMatrix& B) {
  const Index n = A.rows();
  check_oracle_size(n, n);
  if (A.cols() != n || B.rows() != n || B.cols() != n) {
    throw DimensionError("exact_gheig: operands must be square and conformable");
  }
  const double scale = A.eigen().norm();
  if (scale > 0 && (A.eigen() - A.eigen().transpose()).norm() > 1e-10 * scale) {
    throw std::invalid_argument("exact_gheig: A is not symmetric");
  }
  const Matrix As = 0.5 * (A.eigen() + A.eigen().transpose());
  const Matrix Bs = 0.5 * (B.eigen() + B.eigen().transpose());

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(As, Bs, Eigen::Ax_lBx | Eigen::ComputeEigenvectors);
  if (ges.info() != Eigen::Success) {
    throw std::runtime_error("exact_gheig: eigensolver failed (is B positive definite?)");
  }
  ExactGheig out;
  out.values = ges.eigenvalues().reverse();
  Matrix vecs(n, n);
  for (Index j = 0; j < n; ++j) vecs.col(j) = ges.eigenvectors().col(n - 1 - j);
  out.vectors = DenseMatrix(std::move(vecs));
  return out;
}

}  // namespace gsvd
