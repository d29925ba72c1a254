#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

#include "gsvd/dense_matrix.hpp"
#include "gsvd/types.hpp"

namespace gsvd {

/// Matrix-free linear operator. Access is through apply/apply_transpose only;
/// every call bumps a counter so algorithm costs can be audited in matvecs.
/// Counters are atomic: applies on distinct vectors may run concurrently.
class LinearOp {
 public:
  virtual ~LinearOp() = default;
  LinearOp(const LinearOp&) = delete;
  LinearOp& operator=(const LinearOp&) = delete;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  /// y = A x. x must have length cols().
  Vector apply(const Vector& x) const;
  /// y = A^T x. x must have length rows().
  Vector apply_transpose(const Vector& x) const;

  std::int64_t apply_count() const { return applies_.load(); }
  std::int64_t apply_transpose_count() const { return transpose_applies_.load(); }
  void reset_counters() const { applies_ = 0; transpose_applies_ = 0; }

 protected:
  LinearOp(Index rows, Index cols) : rows_(rows), cols_(cols) {}
  virtual Vector do_apply(const Vector& x) const = 0;
  virtual Vector do_apply_transpose(const Vector& x) const = 0;

 private:
  Index rows_, cols_;
  mutable std::atomic<std::int64_t> applies_{0};
  mutable std::atomic<std::int64_t> transpose_applies_{0};
};

/// Symmetric positive definite weight. apply is W*x, solve is W^{-1}*x;
/// both are counted separately.
class SpdOp {
 public:
  virtual ~SpdOp() = default;
  SpdOp(const SpdOp&) = delete;
  SpdOp& operator=(const SpdOp&) = delete;

  Index dim() const { return n_; }

  Vector apply(const Vector& x) const;
  Vector solve(const Vector& x) const;

  std::int64_t apply_count() const { return applies_.load(); }
  std::int64_t solve_count() const { return solves_.load(); }
  void reset_counters() const { applies_ = 0; solves_ = 0; }

 protected:
  explicit SpdOp(Index n) : n_(n) {}
  virtual Vector do_apply(const Vector& x) const = 0;
  virtual Vector do_solve(const Vector& x) const = 0;

 private:
  Index n_;
  mutable std::atomic<std::int64_t> applies_{0};
  mutable std::atomic<std::int64_t> solves_{0};
};

/// Dense matrix behind the LinearOp interface.
class DenseOp final : public LinearOp {
 public:
  explicit DenseOp(DenseMatrix M) : LinearOp(M.rows(), M.cols()), m_(std::move(M)) {}
  const DenseMatrix& matrix() const { return m_; }

 protected:
  Vector do_apply(const Vector& x) const override { return m_.eigen() * x; }
  Vector do_apply_transpose(const Vector& x) const override {
    return m_.eigen().transpose() * x;
  }

 private:
  DenseMatrix m_;
};

/// Dense SPD weight. Requires symmetry to 1e-12 relative (Frobenius); the
/// stored matrix is the symmetrized (W + W^T)/2 and solves go through its
/// Cholesky factor, computed once at construction.
class SpdDenseOp final : public SpdOp {
 public:
  explicit SpdDenseOp(const DenseMatrix& W);
  const Matrix& matrix() const { return w_; }
  const Matrix& cholesky_factor() const { return chol_; }  // lower triangular

 protected:
  Vector do_apply(const Vector& x) const override { return w_ * x; }
  Vector do_solve(const Vector& x) const override;

 private:
  Matrix w_;
  Matrix chol_;
};

/// View of an SpdOp as its inverse: apply = inner.solve, solve = inner.apply.
/// Used where an algorithm needs the weight T^{-1}; the inner operator's
/// counters record the underlying work.
class InverseSpdView final : public SpdOp {
 public:
  explicit InverseSpdView(const SpdOp& inner) : SpdOp(inner.dim()), inner_(inner) {}

 protected:
  Vector do_apply(const Vector& x) const override { return inner_.solve(x); }
  Vector do_solve(const Vector& x) const override { return inner_.apply(x); }

 private:
  const SpdOp& inner_;
};

/// View of a LinearOp as its transpose.
class TransposeView final : public LinearOp {
 public:
  explicit TransposeView(const LinearOp& inner)
      : LinearOp(inner.cols(), inner.rows()), inner_(inner) {}

 protected:
  Vector do_apply(const Vector& x) const override { return inner_.apply_transpose(x); }
  Vector do_apply_transpose(const Vector& x) const override { return inner_.apply(x); }

 private:
  const LinearOp& inner_;
};

/// Wraps an operator so every matvec carries a relative error of exactly
/// rel_tol, emulating a truncated iterative solve. The error direction is
/// i.i.d. Gaussian, seeded per wrapper and indexed by call order, so a serial
/// run is reproducible. rel_tol = 0 reproduces the inner operator bit for bit.
class InexactOp final : public LinearOp {
 public:
  InexactOp(const LinearOp& inner, double rel_tol, std::uint64_t seed);

 protected:
  Vector do_apply(const Vector& x) const override;
  Vector do_apply_transpose(const Vector& x) const override;

 private:
  Vector perturb(Vector y, std::uint64_t stream) const;
  const LinearOp& inner_;
  double rel_tol_;
  std::uint64_t seed_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// Factory spellings for the adapters.
inline DenseOp dense_adapter(DenseMatrix M) { return DenseOp(std::move(M)); }
inline SpdDenseOp spd_dense_adapter(const DenseMatrix& W) { return SpdDenseOp(W); }

/// sqrt(x^T W x). Small negative radicands from roundoff are clamped; a
/// radicand clearly below zero signals a non-SPD weight and throws.
double weighted_norm(const Vector& x, const SpdOp& W);

/// ||A||_{S,T} = largest singular value of L_S^T A L_T^{-T}. Desk-scale
/// diagnostic: materializes the operator and factors dense copies of S and T.
double weighted_op_norm(const LinearOp& A, const SpdOp& S, const SpdOp& T);
double weighted_op_norm(const DenseMatrix& A, const DenseMatrix& S, const DenseMatrix& T);

/// Applies A to the identity, column by column. Counts rows()*... matvecs.
DenseMatrix materialize(const LinearOp& A);
/// Applies W to the identity.
DenseMatrix materialize(const SpdOp& W);

}  // namespace gsvd
