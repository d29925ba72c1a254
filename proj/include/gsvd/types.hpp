#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gsvd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

/// Row-major storage backs all dense matrices in the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr const char* kVersion = "0.1.0";

/// Mismatched operand shapes.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Cholesky breakdown: the matrix is not (numerically) positive definite.
/// Carries the index of the first failing pivot.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(const std::string& context, Index pivot)
      : std::runtime_error(context + ": not positive definite, pivot " +
                           std::to_string(pivot)),
        pivot_(pivot) {}
  Index pivot() const { return pivot_; }

 private:
  Index pivot_;
};

/// Numerically rank-deficient input where full column rank is required.
/// Carries the offending column index.
class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(const std::string& context, Index column)
      : std::runtime_error(context + ": rank deficient at column " +
                           std::to_string(column)),
        column_(column) {}
  Index column() const { return column_; }

 private:
  Index column_;
};

}  // namespace gsvd
