#pragma once

#include <optional>

#include "gsvd/dense_matrix.hpp"
#include "gsvd/operators.hpp"
#include "gsvd/rand_gsvd.hpp"
#include "gsvd/reference.hpp"

namespace gsvd {

/// The sketch fails the full-row-rank assumption rank(Omega1) = k.
class RankAssumptionError : public std::runtime_error {
 public:
  explicit RankAssumptionError(const std::string& what) : std::runtime_error(what) {}
};

/// Accuracy of computed factors against the exact oracle.
struct ErrorReport {
  double abs_error = 0;      ///< ||A - Ahat||_{S,T}
  double rel_error = 0;      ///< abs_error / ||A||_{S,T}
  double best_possible = 0;  ///< sigma_{r+1} / sigma_1
  Vector sv_abs_errors;      ///< |sigma_j - sigma_hat_j|, j = 1..r
  Vector left_angles;        ///< canonical angles (radians), nonincreasing
  Vector right_angles;
};

/// Weighted-norm error, per-value errors and canonical angles between the
/// computed and exact singular subspaces. Left angles are measured in the
/// S inner product, right angles in T; both blocks are re-orthonormalized in
/// the relevant weight before the product, and cosines are clamped to [0,1].
ErrorReport error_report(const DenseMatrix& A, const DenseMatrix& S,
                         const DenseMatrix& T, const GsvdFactors& f,
                         const ExactGsvd& truth);

/// The sketch interaction terms of the error bounds:
///   Omega1 = V_k^T T Omega,   Omega2 = V_perp^T T Omega,
///   omega = ||Omega2 pinv(Omega1)||_2,
///   sigma_weighted = ||Sigma_perp Omega2 pinv(Omega1)||_2.
/// Throws RankAssumptionError when rank(Omega1) < k (numerical rank with
/// singular values below 1e-12 times the largest treated as zero).
struct InteractionTerms {
  double omega = 0;
  double sigma_weighted = 0;
};
InteractionTerms omega_interaction_terms(const DenseMatrix& Omega, const SpdOp& T,
                                         const ExactGsvd& truth, Index k);
double omega_interaction(const DenseMatrix& Omega, const SpdOp& T,
                         const ExactGsvd& truth, Index k);

/// The probabilistic tail constant
///   C_g = (e sqrt(l)/p) ((2/delta)/sqrt(2 pi (p+1)))^{1/(p+1)}
///         (sqrt(n-k) + sqrt(l) + sqrt(2 log(2/delta)))
/// with l = k + p. Requires p >= 2 and delta in (0,1).
double cg_constant(Index k, Index p, Index n, double delta);

/// Everything the executable bounds need. sigma comes from the reference
/// oracle; kappa_T is kappa_2(T), or kappa_2(L^T T L) under preconditioned
/// sampling; the interaction terms are per-realization and optional.
struct BoundInputs {
  Index k = 1, p = 0, q = 0;
  double delta = 0.1;
  Index n = 0;
  Vector sigma;
  double kappa_T = 1.0;
  std::optional<double> gamma_k;  ///< sigma_{k+1}/sigma_k; derived from sigma if absent
  std::optional<double> omega_interaction;
  std::optional<double> sigma_weighted_interaction;
};

/// Right-hand sides of the error bounds, evaluated for one realization, and
/// whether the realized error respects each (with optional slack).
struct BoundReport {
  double realized_error = 0;
  double sigma_kp1 = 0;
  double gamma_k = 0;
  std::optional<double> gap_dep_rhs;        ///< sqrt(s^2 + g^{4q} sigma_weighted^2)
  std::optional<double> gap_dep_rhs_loose;  ///< s sqrt(1 + g^{4q} omega^2)
  std::optional<double> gap_indep_rhs;      ///< (1 + omega^2)^{1/(4q+2)} s
  std::optional<double> prob_gap_dep_rhs;   ///< (1 + g^{4q+2} kappa C^2)^{1/2} s
  std::optional<double> prob_gap_indep_rhs; ///< (1 + kappa C^2)^{1/(4q+2)} s
  bool gap_dep_holds = true;
  bool gap_indep_holds = true;
  bool prob_gap_dep_holds = true;
  bool prob_gap_indep_holds = true;
  bool partial = false;  ///< per-sample terms missing, probabilistic-only report
};
BoundReport bound_check(const BoundInputs& inputs, double realized_error,
                        double slack = 0.0);

/// Interlacing chain lambda_{k+1}(T)/lambda_k(T) <= ||Gamma2|| ||Gamma1^{-1}||
/// <= kappa_2(T) with Gamma1 = V_k^T T^2 V_k and Gamma2 = V_perp^T T^2 V_perp.
struct InterlacingReport {
  double lower = 0, middle = 0, upper = 0;
  bool passed = false;
};
InterlacingReport gamma_interlacing_check(const DenseMatrix& T, const ExactGsvd& truth,
                                          Index k);

/// Hyper-differential sensitivity indices from truncated factors:
///   s_i = ||diag(sigma) V^T T theta_i||_2 / ||theta_i||_T
/// for each basis column theta_i (valid because U has S-orthonormal columns).
Vector sensitivity_indices(const GsvdFactors& f, const SpdOp& T, const DenseMatrix& basis);

}  // namespace gsvd
