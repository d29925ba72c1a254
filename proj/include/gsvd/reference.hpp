#pragma once

#include "gsvd/dense_matrix.hpp"

namespace gsvd {

/// Full (S,T)-GSVD of a dense matrix: A = U Sigma V^T T with U^T S U = I and
/// V^T T V = I. This is the desk-scale ground truth for all error
/// measurements; it refuses inputs above the size cap rather than degrade.
struct ExactGsvd {
  DenseMatrix U;  ///< m-by-m, S-orthogonal
  Vector sigma;   ///< length min(m,n), nonincreasing
  DenseMatrix V;  ///< n-by-n, T-orthogonal

  /// Leading k columns of U / V.
  Matrix U_k(Index k) const { return U.eigen().leftCols(k); }
  Matrix V_k(Index k) const { return V.eigen().leftCols(k); }
  /// Trailing n-k columns of V (the residual right subspace).
  Matrix V_perp(Index k) const { return V.eigen().rightCols(V.cols() - k); }
};

inline constexpr Index kOracleSizeCap = 2048;

/// Cholesky-transform route: S = L_S L_S^T, T = L_T L_T^T, then the dense SVD
/// of L_S^T A L_T^{-T} = W S_A Z^T gives U = L_S^{-T} W, V = L_T^{-T} Z.
ExactGsvd exact_gsvd(const DenseMatrix& A, const DenseMatrix& S, const DenseMatrix& T);

/// Checks s_j(A)/sqrt(||S^{-1}|| ||T||) <= sigma_j(A) <= sqrt(||S|| ||T^{-1}||) s_j(A)
/// for every j.
struct SandwichReport {
  Vector lower;         ///< s_j / sqrt(||S^{-1}|| ||T||)
  Vector sigma;         ///< generalized singular values
  Vector upper;         ///< sqrt(||S|| ||T^{-1}||) s_j
  bool passed = false;
  Index first_violation = -1;
};
SandwichReport singular_value_sandwich_check(const DenseMatrix& A, const DenseMatrix& S,
                                             const DenseMatrix& T);

/// Symmetric-definite generalized eigenproblem A x = lambda B x with A
/// symmetric PSD and B SPD. Values descend; vectors are B-orthonormal.
struct ExactGheig {
  Vector values;
  DenseMatrix vectors;
};
ExactGheig exact_gheig(const DenseMatrix& A, const DenseMatrix& B);

}  // namespace gsvd
