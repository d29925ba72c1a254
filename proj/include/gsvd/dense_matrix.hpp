#pragma once

#include <initializer_list>

#include "gsvd/types.hpp"

namespace gsvd {

/// Dense real matrix, row-major. Constructors reject NaN/Inf entries, so a
/// DenseMatrix built from user data is always finite.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols) : m_(Matrix::Zero(rows, cols)) {}

  /// Takes ownership of an Eigen expression; throws on non-finite entries.
  explicit DenseMatrix(Matrix values);

  template <typename Derived>
  explicit DenseMatrix(const Eigen::MatrixBase<Derived>& values)
      : DenseMatrix(Matrix(values)) {}

  static DenseMatrix identity(Index n) { return DenseMatrix(Matrix(Matrix::Identity(n, n))); }
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }

  double operator()(Index i, Index j) const { return m_(i, j); }
  double& operator()(Index i, Index j) { return m_(i, j); }

  const Matrix& eigen() const { return m_; }
  Matrix& eigen() { return m_; }

 private:
  Matrix m_;
};

}  // namespace gsvd
