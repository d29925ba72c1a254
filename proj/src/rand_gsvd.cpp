#include "gsvd/rand_gsvd.hpp"

#include <cmath>
#include <iostream>

#include "gsvd/linalg.hpp"
#include "gsvd/weighted_qr.hpp"

namespace gsvd {

void SketchConfig::validate(Index m, Index n) const {
  if (k < 1) throw std::invalid_argument("SketchConfig: k must be >= 1");
  if (p < 0) throw std::invalid_argument("SketchConfig: p must be >= 0");
  if (q < 0) throw std::invalid_argument("SketchConfig: q must be >= 0");
  if (ell() > std::min(m, n)) {
    throw std::invalid_argument("SketchConfig: k + p exceeds min(m, n)");
  }
  sampler.validate();
}

namespace {

Matrix apply_columns(const LinearOp& A, const Matrix& X) {
  Matrix Y(A.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) Y.col(j) = A.apply(X.col(j));
  return Y;
}

Matrix apply_transpose_columns(const LinearOp& A, const Matrix& X) {
  Matrix Y(A.cols(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) Y.col(j) = A.apply_transpose(X.col(j));
  return Y;
}

Matrix solve_columns(const SpdOp& W, const Matrix& X) {
  Matrix Y(W.dim(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) Y.col(j) = W.solve(X.col(j));
  return Y;
}

// CholQR with the stabilization policy of the drivers: one refinement pass if
// the residual estimate exceeds the trigger, and recovery from rank-deficient
// sketches by dropping trailing columns (never below min_cols).
WeightedQrResult cholqr_with_retry(Matrix Z, const SpdOp& W, bool want_wq,
                                   Index min_cols, RouteStats* stats,
                                   const char* where) {
  for (;;) {
    try {
      WeightedQrResult res = weighted_cholqr(DenseMatrix(Z), W, want_wq);
      if (res.ortho_residual_estimate > kReorthThreshold) {
        res = reorthogonalize(res, W);
        if (stats) ++stats->reorth_passes;
      }
      return res;
    } catch (const RankDeficiencyError& e) {
      const Index keep = std::max(min_cols, e.column());
      if (keep >= Z.cols()) {
        throw RankDeficiencyError(where, e.column());
      }
      if (stats) stats->retry_drops += Z.cols() - keep;
      Z = Z.leftCols(keep).eval();
    }
  }
}

struct Stage1 {
  Matrix Q;   // S-orthonormal basis
  Matrix SQ;  // S * Q, no extra matvecs
};

Stage1 run_subspace_iteration(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                              const DenseMatrix& Omega, Index q, Index min_cols,
                              RouteStats* stats) {
  const InverseSpdView Tinv(T);
  Matrix Y = apply_columns(A, Omega.eigen());
  WeightedQrResult r = cholqr_with_retry(std::move(Y), S, true, min_cols, stats,
                                         "rand_subspace (initial sketch)");
  for (Index it = 0; it < q; ++it) {
    Y = apply_transpose_columns(A, r.WQ->eigen());
    WeightedQrResult rt = cholqr_with_retry(std::move(Y), Tinv, true, min_cols, stats,
                                            ("rand_subspace (iteration " +
                                             std::to_string(it + 1) + ")").c_str());
    // rt.WQ holds T^{-1} Q
    Y = apply_columns(A, rt.WQ->eigen());
    r = cholqr_with_retry(std::move(Y), S, true, min_cols, stats,
                          ("rand_subspace (iteration " + std::to_string(it + 1) + ")").c_str());
  }
  return Stage1{r.Q.eigen(), r.WQ->eigen()};
}

struct Alg3Core {
  Matrix Q;     // stage-1 basis, S-orthonormal
  Matrix QB;    // stage-2 basis, T-orthonormal
  Matrix SQ;    // S * Q
  Matrix WQB;   // T * QB (for the transpose route: the mapped-back factor)
  Matrix UB, VB;
  Vector sigma;
};

Alg3Core run_alg3(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                  const DenseMatrix& Omega, Index q, Index min_cols,
                  RouteStats* stats) {
  // Stage 1: range finder
  Stage1 s1 = run_subspace_iteration(A, S, T, Omega, q, min_cols, stats);

  // Stage 2: B = A^T S Q, CholQR(T^{-1} B, T), SVD of R_B^T
  Matrix B = apply_transpose_columns(A, s1.SQ);
  Matrix TiB = solve_columns(T, B);
  WeightedQrResult rb = cholqr_with_retry(std::move(TiB), T, true, min_cols, stats,
                                          "rand_gsvd (stage 2)");
  // If stage 2 dropped columns, only the matching leading columns of Q survive.
  const Index lb = rb.Q.cols();
  Eigen::BDCSVD<Matrix> svd(Matrix(rb.R.eigen().transpose()),
                            Eigen::ComputeFullU | Eigen::ComputeFullV);
  Alg3Core core;
  core.Q = s1.Q.leftCols(lb);
  core.SQ = s1.SQ.leftCols(lb);
  core.QB = rb.Q.eigen();
  core.WQB = rb.WQ->eigen();
  core.UB = svd.matrixU();
  core.VB = svd.matrixV();
  core.sigma = svd.singularValues();
  return core;
}

void truncate_factors(GsvdFactors& f, Index k) {
  if (k < f.sigma.size()) {
    f.U = DenseMatrix(Matrix(f.U.eigen().leftCols(k)));
    f.V = DenseMatrix(Matrix(f.V.eigen().leftCols(k)));
    f.sigma = f.sigma.head(k).eval();
  }
}

}  // namespace

DenseMatrix rand_subspace(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                          const DenseMatrix& Omega, Index q, RouteStats* stats) {
  if (Omega.rows() != A.cols()) {
    throw DimensionError("rand_subspace: Omega must have A.cols() rows");
  }
  if (Omega.cols() > std::min(A.rows(), A.cols())) {
    throw DimensionError("rand_subspace: sketch wider than min(m, n)");
  }
  Stage1 s1 = run_subspace_iteration(A, S, T, Omega, q, 1, stats);
  return DenseMatrix(std::move(s1.Q));
}

GsvdFactors rand_gsvd(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                      const SketchConfig& cfg, RouteStats* stats) {
  cfg.validate(A.rows(), A.cols());
  const DenseMatrix Omega = draw(cfg.sampler, A.cols(), cfg.ell());
  Alg3Core core = run_alg3(A, S, T, Omega, cfg.q, cfg.k, stats);

  GsvdFactors f;
  f.U = DenseMatrix(Matrix(core.Q * core.UB));
  f.V = DenseMatrix(Matrix(core.QB * core.VB));
  f.sigma = std::move(core.sigma);
  if (cfg.truncate) truncate_factors(f, cfg.k);
  return f;
}

GsvdFactors rand_gsvd_transpose(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                                const SketchConfig& cfg, RouteStats* stats) {
  cfg.validate(A.rows(), A.cols());
  const TransposeView At(A);
  const InverseSpdView Sinv(S), Tinv(T);

  // (T^{-1}, S^{-1})-GSVD of A^T: A^T ~ X Sigma Y^T S^{-1}; mapped back,
  // U = S^{-1} Y and V = T^{-1} X come from the stage WQ products for free.
  const DenseMatrix Omega = draw(cfg.sampler, At.cols(), cfg.ell());
  Alg3Core core = run_alg3(At, Tinv, Sinv, Omega, cfg.q, cfg.k, stats);

  GsvdFactors f;
  f.U = DenseMatrix(Matrix(core.WQB * core.VB));  // S^{-1} Q_B V_B
  f.V = DenseMatrix(Matrix(core.SQ * core.UB));   // T^{-1} Q U_B
  f.sigma = std::move(core.sigma);
  if (cfg.truncate) truncate_factors(f, cfg.k);
  return f;
}

GsvdFactors two_sided_gsvd(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                           const SketchConfig& cfg, RouteStats* stats) {
  cfg.validate(A.rows(), A.cols());
  if (cfg.sampler.kind != SamplerSpec::Kind::gaussian) {
    throw std::invalid_argument("two_sided_gsvd: only the gaussian sampler is supported");
  }
  const Index l = cfg.ell();
  const InverseSpdView Tinv(T);

  const DenseMatrix Omega = draw_gaussian(A.cols(), l, cfg.sampler.seed);
  const DenseMatrix Psi = draw_gaussian(A.rows(), l, cfg.sampler.seed ^ rng::kSubSeedXor);

  WeightedQrResult rq = cholqr_with_retry(apply_columns(A, Omega.eigen()), S, true,
                                          cfg.k, stats, "two_sided_gsvd (row sketch)");
  WeightedQrResult rz = cholqr_with_retry(apply_transpose_columns(A, Psi.eigen()),
                                          Tinv, true, cfg.k, stats,
                                          "two_sided_gsvd (column sketch)");
  // F = Q^T S A T^{-1} Z, using the in-hand S Q and T^{-1} Z
  const Matrix ATiZ = apply_columns(A, rz.WQ->eigen());
  const Matrix F = rq.WQ->eigen().transpose() * ATiZ;

  Eigen::BDCSVD<Matrix> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  GsvdFactors f;
  f.U = DenseMatrix(Matrix(rq.Q.eigen() * svd.matrixU()));
  f.V = DenseMatrix(Matrix(rz.WQ->eigen() * svd.matrixV()));
  f.sigma = svd.singularValues();
  if (cfg.truncate) truncate_factors(f, cfg.k);
  return f;
}

GsvdFactors gheig_gsvd(const LinearOp& A, const SpdOp& S, const SpdOp& T,
                       const SketchConfig& cfg, RouteStats* stats) {
  cfg.validate(A.rows(), A.cols());
  if (cfg.sampler.kind != SamplerSpec::Kind::gaussian) {
    throw std::invalid_argument("gheig_gsvd: only the gaussian sampler is supported");
  }
  const Index l = cfg.ell();
  const DenseMatrix Omega = draw_gaussian(A.cols(), l, cfg.sampler.seed);

  // Range finder for C = T^{-1} A^T S A in the (T, T) geometry
  Matrix Y = apply_columns(A, Omega.eigen());
  Matrix SY(S.dim(), Y.cols());
  for (Index j = 0; j < Y.cols(); ++j) SY.col(j) = S.apply(Y.col(j));
  Matrix CY = solve_columns(T, apply_transpose_columns(A, SY));
  WeightedQrResult rq = cholqr_with_retry(std::move(CY), T, false, cfg.k, stats,
                                          "gheig_gsvd (range finder)");
  const Matrix& Q = rq.Q.eigen();
  const Index lc = Q.cols();

  // Projected pencil: M = Q^T (A^T S A) Q, T-orthonormal Q makes it standard
  const Matrix AQ = apply_columns(A, Q);
  Matrix SAQ(S.dim(), lc);
  for (Index j = 0; j < lc; ++j) SAQ.col(j) = S.apply(AQ.col(j));
  Matrix M = AQ.transpose() * SAQ;
  M = 0.5 * (M + M.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("gheig_gsvd: eigensolver failed on the projected pencil");
  }
  Vector lam(lc);
  Matrix X(lc, lc);
  for (Index j = 0; j < lc; ++j) {
    lam(j) = eig.eigenvalues()(lc - 1 - j);
    X.col(j) = eig.eigenvectors().col(lc - 1 - j);
  }
  const double lam1 = lam.size() > 0 ? std::max(lam(0), 0.0) : 0.0;
  for (Index j = 0; j < lc; ++j) {
    if (lam(j) < -1e-10 * lam1) {
      std::cerr << "gheig_gsvd: projected pencil numerically indefinite (lambda_"
                << j << " = " << lam(j) << "), clamping to 0\n";
    }
    lam(j) = std::max(lam(j), 0.0);
  }

  const Index r = cfg.truncate ? std::min(cfg.k, lc) : lc;
  GsvdFactors f;
  f.sigma = lam.head(r).array().sqrt();
  f.V = DenseMatrix(Matrix(Q * X.leftCols(r)));

  // Left vectors: A V = (A Q) X for free, columns normalized in the S-norm,
  // then one CholQR pass in S to pin orthonormality down
  Matrix U0 = AQ * X.leftCols(r);
  const Matrix SU0 = SAQ * X.leftCols(r);
  for (Index j = 0; j < r; ++j) {
    const double ns = std::sqrt(std::max(U0.col(j).dot(SU0.col(j)), 0.0));
    if (ns > 0) U0.col(j) /= ns;
  }
  WeightedQrResult ru = cholqr_with_retry(std::move(U0), S, false, r, stats,
                                          "gheig_gsvd (left vectors)");
  f.U = std::move(ru.Q);
  return f;
}

ReconstructedOp::ReconstructedOp(GsvdFactors f, const SpdOp& T)
    : LinearOp(f.U.rows(), f.V.rows()), f_(std::move(f)), t_(T) {}

Vector ReconstructedOp::do_apply(const Vector& x) const {
  if (f_.rank() == 0) return Vector::Zero(rows());
  const Vector tx = t_.apply(x);
  return f_.U.eigen() * (f_.sigma.asDiagonal() * (f_.V.eigen().transpose() * tx));
}

Vector ReconstructedOp::do_apply_transpose(const Vector& x) const {
  if (f_.rank() == 0) return Vector::Zero(cols());
  const Vector inner = f_.V.eigen() * (f_.sigma.asDiagonal() * (f_.U.eigen().transpose() * x));
  return t_.apply(inner);
}

MatvecCounts expected_matvec_counts(GsvdRoute route, Index ell, Index q, Index r) {
  MatvecCounts c;
  switch (route) {
    case GsvdRoute::direct:
      c.a = (q + 1) * ell;
      c.at = (q + 1) * ell;       // q*l in stage 1 plus l in stage 2
      c.s_apply = (q + 1) * ell;  // q*l in the iterations plus the initial CholQR
      c.t_apply = ell;
      c.t_solve = (q + 1) * ell;
      break;
    case GsvdRoute::transpose:
      c.a = (q + 1) * ell;
      c.at = (q + 1) * ell;
      c.s_apply = (q + 1) * ell;
      c.s_solve = ell;            // replaces the l applies of T
      c.t_solve = (q + 1) * ell;
      break;
    case GsvdRoute::two_sided:
      c.a = 2 * ell;
      c.at = ell;
      c.s_apply = ell;
      c.t_solve = ell;
      break;
    case GsvdRoute::gheig:
      c.a = 2 * ell;
      c.at = ell;
      c.s_apply = 2 * ell + r;    // sketch, pencil projection, final CholQR
      c.t_apply = ell;
      c.t_solve = ell;
      break;
  }
  return c;
}

MatvecCounts observed_matvec_counts(const LinearOp& A, const SpdOp& S, const SpdOp& T) {
  MatvecCounts c;
  c.a = A.apply_count();
  c.at = A.apply_transpose_count();
  c.s_apply = S.apply_count();
  c.s_solve = S.solve_count();
  c.t_apply = T.apply_count();
  c.t_solve = T.solve_count();
  return c;
}

}  // namespace gsvd
