#pragma once

#include <cstdint>

#include "gsvd/dense_matrix.hpp"
#include "gsvd/operators.hpp"
#include "gsvd/sampling.hpp"

namespace gsvd {

/// Sketch parameters: target rank k, oversampling p (l = k + p columns),
/// q subspace iterations, and the sampler that produces the test matrix.
struct SketchConfig {
  Index k = 1;
  Index p = 10;
  Index q = 0;
  SamplerSpec sampler;
  bool truncate = true;

  Index ell() const { return k + p; }
  void validate(Index m, Index n) const;
};

/// Approximate (S,T)-GSVD: A ~ U diag(sigma) V^T T with U^T S U = I and
/// V^T T V = I. rank() is l = k+p, or k after truncation (less if the sketch
/// lost rank and trailing columns were dropped).
struct GsvdFactors {
  DenseMatrix U;  ///< m-by-r, S-orthonormal columns
  Vector sigma;   ///< length r, nonincreasing, >= 0
  DenseMatrix V;  ///< n-by-r, T-orthonormal columns

  Index rank() const { return sigma.size(); }
};

/// Incidentals of a driver run: stabilization passes actually taken.
struct RouteStats {
  Index reorth_passes = 0;   ///< refinement passes triggered by the residual estimate
  Index retry_drops = 0;     ///< trailing sketch columns dropped after rank deficiency
};

/// Randomized subspace iteration in weighted inner products. Returns Q with
/// Q^T S Q = I spanning range((A T^{-1} A^T S)^q A Omega), computed stably by
/// alternating weighted CholQR factorizations:
///
///   Y = A Omega;            [Q, ~] = CholQR(Y, S)
///   repeat q times:
///     Y = A^T (S Q);        [Q, ~] = CholQR(Y, T^{-1})
///     Y = A (T^{-1} Q);     [Q, ~] = CholQR(Y, S)
///
/// The weighted products S Q and T^{-1} Q are taken from the preceding
/// CholQR's WQ output, so the matvec budget is exactly (q+1)l applies of A,
/// ql of A^T, (q+1)l of S and ql solves with T.
DenseMatrix rand_subspace(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                          const DenseMatrix& Omega, Index q,
                          RouteStats* stats = nullptr);

/// Two-stage randomized GSVD. Stage 1 is rand_subspace; stage 2 projects,
/// factors B = A^T S Q through CholQR(T^{-1} B, T) and a small dense SVD, and
/// optionally truncates to rank k.
GsvdFactors rand_gsvd(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                      const SketchConfig& cfg, RouteStats* stats = nullptr);

/// Runs the algorithm on A^T with weights (T^{-1}, S^{-1}) and maps the
/// factors back. Trades the l applies of T for l solves with S; preferable
/// when S is better conditioned or cheaper to solve than T.
GsvdFactors rand_gsvd_transpose(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                                const SketchConfig& cfg, RouteStats* stats = nullptr);

/// Comparison baseline: independent row and column sketches Y = A Omega,
/// Z = A^T Psi, then the SVD of the projected core F = Q^T S A T^{-1} Z.
/// The second sketch uses the sub-seed seed ^ rng::kSubSeedXor.
GsvdFactors two_sided_gsvd(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                           const SketchConfig& cfg, RouteStats* stats = nullptr);

/// Comparison baseline through the generalized eigenproblem
/// A^T S A x = lambda T x: a randomized range finder for C = T^{-1} A^T S A
/// in the (T,T) geometry, eigenpairs of the projected pencil, sigma = sqrt(lambda),
/// and left vectors recovered from A V with one CholQR pass in S.
GsvdFactors gheig_gsvd(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                       const SketchConfig& cfg, RouteStats* stats = nullptr);

/// The factored operator x -> U diag(sigma) V^T T x as a LinearOp.
/// Holds copies of the factors; T must outlive the returned operator.
class ReconstructedOp final : public LinearOp {
 public:
  ReconstructedOp(GsvdFactors f, const SpdOp& T);

 protected:
  Vector do_apply(const Vector& x) const override;
  Vector do_apply_transpose(const Vector& x) const override;

 private:
  GsvdFactors f_;
  const SpdOp& t_;
};

inline ReconstructedOp reconstruct(GsvdFactors f, const SpdOp& T) {
  return ReconstructedOp(std::move(f), T);
}

/// Matvec budgets per route at sketch width l, iteration count q and final
/// rank r. The direct and transpose routes follow the subspace-iteration cost
/// model; the baselines have their own documented tallies.
struct MatvecCounts {
  std::int64_t a = 0, at = 0;
  std::int64_t s_apply = 0, s_solve = 0;
  std::int64_t t_apply = 0, t_solve = 0;

  bool operator==(const MatvecCounts&) const = default;
};
enum class GsvdRoute { direct, transpose, two_sided, gheig };
MatvecCounts expected_matvec_counts(GsvdRoute route, Index ell, Index q, Index r);

/// Snapshot of the counters on (A, S, T).
MatvecCounts observed_matvec_counts(const LinearOp& A, const SpdOp& S, const SpdOp& T);

}  // namespace gsvd
