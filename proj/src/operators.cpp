#include "gsvd/operators.hpp"

#include <cmath>

#include "gsvd/linalg.hpp"
#include "gsvd/sampling.hpp"

namespace gsvd {

Vector LinearOp::apply(const Vector& x) const {
  if (x.size() != cols_) {
    throw DimensionError("LinearOp::apply: expected length " + std::to_string(cols_) +
                         ", got " + std::to_string(x.size()));
  }
  ++applies_;
  return do_apply(x);
}

Vector LinearOp::apply_transpose(const Vector& x) const {
  if (x.size() != rows_) {
    throw DimensionError("LinearOp::apply_transpose: expected length " +
                         std::to_string(rows_) + ", got " + std::to_string(x.size()));
  }
  ++transpose_applies_;
  return do_apply_transpose(x);
}

Vector SpdOp::apply(const Vector& x) const {
  if (x.size() != n_) {
    throw DimensionError("SpdOp::apply: expected length " + std::to_string(n_) +
                         ", got " + std::to_string(x.size()));
  }
  ++applies_;
  return do_apply(x);
}

Vector SpdOp::solve(const Vector& x) const {
  if (x.size() != n_) {
    throw DimensionError("SpdOp::solve: expected length " + std::to_string(n_) +
                         ", got " + std::to_string(x.size()));
  }
  ++solves_;
  return do_solve(x);
}

SpdDenseOp::SpdDenseOp(const DenseMatrix& W) : SpdOp(W.rows()) {
  if (W.rows() != W.cols()) {
    throw DimensionError("SpdDenseOp: matrix is not square");
  }
  const Matrix& M = W.eigen();
  const double scale = M.norm();
  if (scale > 0 && (M - M.transpose()).norm() > 1e-12 * scale) {
    throw std::invalid_argument("SpdDenseOp: matrix is not symmetric");
  }
  w_ = 0.5 * (M + M.transpose());
  chol_ = linalg::cholesky_lower(w_, "SpdDenseOp");
}

Vector SpdDenseOp::do_solve(const Vector& x) const {
  Vector y = chol_.triangularView<Eigen::Lower>().solve(x);
  return chol_.triangularView<Eigen::Lower>().transpose().solve(y);
}

InexactOp::InexactOp(const LinearOp& inner, double rel_tol, std::uint64_t seed)
    : LinearOp(inner.rows(), inner.cols()),
      inner_(inner),
      rel_tol_(rel_tol),
      seed_(seed) {
  if (rel_tol < 0) throw std::invalid_argument("InexactOp: rel_tol must be >= 0");
}

Vector InexactOp::perturb(Vector y, std::uint64_t stream) const {
  const double ynorm = y.norm();
  if (ynorm == 0.0) return y;
  Vector g(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    g(i) = rng::normal(seed_, stream, static_cast<std::uint64_t>(i), 0);
  }
  const double gnorm = g.norm();
  if (gnorm == 0.0) return y;
  return y + g * (rel_tol_ * ynorm / gnorm);
}

Vector InexactOp::do_apply(const Vector& x) const {
  Vector y = inner_.apply(x);
  if (rel_tol_ == 0.0) return y;
  return perturb(std::move(y), rng::kInexact + 2 * calls_.fetch_add(1));
}

Vector InexactOp::do_apply_transpose(const Vector& x) const {
  Vector y = inner_.apply_transpose(x);
  if (rel_tol_ == 0.0) return y;
  return perturb(std::move(y), rng::kInexact + 2 * calls_.fetch_add(1) + 1);
}

double weighted_norm(const Vector& x, const SpdOp& W) {
  if (x.size() != W.dim()) {
    throw DimensionError("weighted_norm: vector length does not match weight");
  }
  const Vector wx = W.apply(x);
  const double radicand = x.dot(wx);
  const double tol = 1e-14 * std::max(1.0, x.norm() * wx.norm());
  if (radicand < -tol) {
    throw std::invalid_argument("weighted_norm: negative x^T W x, weight is not SPD");
  }
  return std::sqrt(std::max(0.0, radicand));
}

DenseMatrix materialize(const LinearOp& A) {
  Matrix M(A.rows(), A.cols());
  Vector e = Vector::Zero(A.cols());
  for (Index j = 0; j < A.cols(); ++j) {
    e(j) = 1.0;
    M.col(j) = A.apply(e);
    e(j) = 0.0;
  }
  return DenseMatrix(std::move(M));
}

DenseMatrix materialize(const SpdOp& W) {
  Matrix M(W.dim(), W.dim());
  Vector e = Vector::Zero(W.dim());
  for (Index j = 0; j < W.dim(); ++j) {
    e(j) = 1.0;
    M.col(j) = W.apply(e);
    e(j) = 0.0;
  }
  return DenseMatrix(std::move(M));
}

double weighted_op_norm(const DenseMatrix& A, const DenseMatrix& S, const DenseMatrix& T) {
  if (S.rows() != A.rows() || T.rows() != A.cols()) {
    throw DimensionError("weighted_op_norm: weight dimensions do not match A");
  }
  Matrix LS = linalg::cholesky_lower(0.5 * (S.eigen() + S.eigen().transpose()),
                                     "weighted_op_norm(S)");
  Matrix LT = linalg::cholesky_lower(0.5 * (T.eigen() + T.eigen().transpose()),
                                     "weighted_op_norm(T)");
  // L_S^T A L_T^{-T}, with the right factor via a transposed lower solve
  Matrix X = linalg::solve_lower(LT, Matrix(A.eigen().transpose())).transpose();
  return linalg::spectral_norm(Matrix(LS.transpose() * X));
}

double weighted_op_norm(const LinearOp& A, const SpdOp& S, const SpdOp& T) {
  if (S.dim() != A.rows() || T.dim() != A.cols()) {
    throw DimensionError("weighted_op_norm: weight dimensions do not match A");
  }
  return weighted_op_norm(materialize(A), materialize(S), materialize(T));
}

}  // namespace gsvd
