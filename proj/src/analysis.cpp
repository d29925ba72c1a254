#include "gsvd/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gsvd/linalg.hpp"
#include "gsvd/weighted_qr.hpp"

namespace gsvd {

namespace {

// Canonical angles between two blocks with W-orthonormal columns: the
// singular values of X^T W Y are the cosines. Both blocks are refreshed to
// W-orthonormality first; roundoff can push cosines just above 1, so clamp.
Vector canonical_angles(const Matrix& X, const Matrix& Y, const SpdOp& W) {
  const WeightedQrResult qx = weighted_cholqr(DenseMatrix(X), W, true);
  const WeightedQrResult qy = weighted_cholqr(DenseMatrix(Y), W, false);
  const Matrix C = qx.WQ->eigen().transpose() * qy.Q.eigen();
  Vector cosines = Eigen::BDCSVD<Matrix>(C).singularValues();
  Vector angles(cosines.size());
  for (Index i = 0; i < cosines.size(); ++i) {
    angles(i) = std::acos(std::clamp(cosines(i), 0.0, 1.0));
  }
  std::sort(angles.data(), angles.data() + angles.size(), std::greater<double>());
  return angles;
}

}  // namespace

ErrorReport error_report(const DenseMatrix& A, const DenseMatrix& S,
                         const DenseMatrix& T, const GsvdFactors& f,
                         const ExactGsvd& truth) {
  const Index r = f.rank();
  const Index nsv = truth.sigma.size();
  if (r < 1) throw std::invalid_argument("error_report: factors have rank 0");
  if (r > nsv) throw std::invalid_argument("error_report: factors wider than spectrum");

  ErrorReport rep;
  const Matrix Ahat =
      f.U.eigen() * f.sigma.asDiagonal() * f.V.eigen().transpose() * T.eigen();
  rep.abs_error = weighted_op_norm(DenseMatrix(Matrix(A.eigen() - Ahat)), S, T);
  rep.rel_error = rep.abs_error / weighted_op_norm(A, S, T);
  rep.best_possible = (r < nsv && truth.sigma(0) > 0) ? truth.sigma(r) / truth.sigma(0) : 0.0;

  rep.sv_abs_errors.resize(r);
  for (Index j = 0; j < r; ++j) {
    rep.sv_abs_errors(j) = std::abs(truth.sigma(j) - f.sigma(j));
  }

  const SpdDenseOp Sop(S), Top(T);
  rep.left_angles = canonical_angles(Matrix(f.U.eigen()), truth.U_k(r), Sop);
  rep.right_angles = canonical_angles(Matrix(f.V.eigen()), truth.V_k(r), Top);
  return rep;
}

InteractionTerms omega_interaction_terms(const DenseMatrix& Omega, const SpdOp& T,
                                         const ExactGsvd& truth, Index k) {
  const Index n = Omega.rows(), l = Omega.cols();
  if (T.dim() != n || truth.V.rows() != n) {
    throw DimensionError("omega_interaction: dimensions do not match");
  }
  if (k < 1 || k > l || k >= n) {
    throw std::invalid_argument("omega_interaction: need 1 <= k <= l and k < n");
  }
  Matrix TOm(n, l);
  for (Index j = 0; j < l; ++j) TOm.col(j) = T.apply(Omega.eigen().col(j));

  const Matrix Om1 = truth.V_k(k).transpose() * TOm;     // k x l
  const Matrix Om2 = truth.V_perp(k).transpose() * TOm;  // (n-k) x l

  Eigen::BDCSVD<Matrix> svd(Om1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  // rank cutoff at 1e-12 of the largest singular value, with the achievable
  // scale ||V_k|| ||T Omega|| guarding against an Omega1 that is all roundoff
  const double scale = linalg::spectral_norm(truth.V_k(k)) * linalg::spectral_norm(TOm);
  if (s(0) <= 1e-12 * scale || s(k - 1) <= 1e-12 * s(0)) {
    throw RankAssumptionError(
        "omega_interaction: rank(Omega1) < k, sketch misses the dominant subspace");
  }
  // pinv(Omega1) = V diag(1/s) U^T
  const Matrix pinv =
      svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  const Matrix M = Om2 * pinv;  // (n-k) x k

  InteractionTerms terms;
  terms.omega = linalg::spectral_norm(M);
  const Index tail = truth.sigma.size() - k;  // rows of Sigma_perp M
  Matrix SM = M.topRows(tail);
  for (Index i = 0; i < tail; ++i) SM.row(i) *= truth.sigma(k + i);
  terms.sigma_weighted = linalg::spectral_norm(SM);
  return terms;
}

double omega_interaction(const DenseMatrix& Omega, const SpdOp& T,
                         const ExactGsvd& truth, Index k) {
  return omega_interaction_terms(Omega, T, truth, k).omega;
}

double cg_constant(Index k, Index p, Index n, double delta) {
  if (p < 2) throw std::invalid_argument("cg_constant: need p >= 2");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("cg_constant: need delta in (0,1)");
  }
  const Index l = k + p;
  if (l > n) throw std::invalid_argument("cg_constant: need k + p <= n");
  const double dl = double(l), dp = double(p);
  const double t1 = std::exp(1.0) * std::sqrt(dl) / dp;
  const double t2 =
      std::pow((2.0 / delta) / std::sqrt(2.0 * M_PI * (dp + 1.0)), 1.0 / (dp + 1.0));
  const double t3 = std::sqrt(double(n - k)) + std::sqrt(dl) +
                    std::sqrt(2.0 * std::log(2.0 / delta));
  return t1 * t2 * t3;
}

BoundReport bound_check(const BoundInputs& in, double realized_error, double slack) {
  if (in.k < 1 || in.k > in.sigma.size()) {
    throw std::invalid_argument("bound_check: k out of range of the spectrum");
  }
  BoundReport rep;
  rep.realized_error = realized_error;
  rep.sigma_kp1 = (in.k < in.sigma.size()) ? in.sigma(in.k) : 0.0;
  if (in.gamma_k) {
    rep.gamma_k = *in.gamma_k;
  } else {
    rep.gamma_k = in.sigma(in.k - 1) > 0 ? rep.sigma_kp1 / in.sigma(in.k - 1) : 0.0;
  }
  const double g4q = std::pow(rep.gamma_k, 4.0 * double(in.q));
  const double s = rep.sigma_kp1;

  if (in.sigma_weighted_interaction) {
    const double sw = *in.sigma_weighted_interaction;
    rep.gap_dep_rhs = std::sqrt(s * s + g4q * sw * sw);
  } else if (in.omega_interaction) {
    rep.gap_dep_rhs = s * std::sqrt(1.0 + g4q * (*in.omega_interaction) *
                                              (*in.omega_interaction));
  }
  if (in.omega_interaction) {
    const double w = *in.omega_interaction;
    rep.gap_dep_rhs_loose = s * std::sqrt(1.0 + g4q * w * w);
    rep.gap_indep_rhs =
        std::pow(1.0 + w * w, 1.0 / (4.0 * double(in.q) + 2.0)) * s;
  } else {
    rep.partial = true;
  }

  if (in.p >= 2) {
    const double C = cg_constant(in.k, in.p, in.n, in.delta);
    const double kc2 = in.kappa_T * C * C;
    rep.prob_gap_dep_rhs =
        std::sqrt(1.0 + std::pow(rep.gamma_k, 4.0 * double(in.q) + 2.0) * kc2) * s;
    rep.prob_gap_indep_rhs = std::pow(1.0 + kc2, 1.0 / (4.0 * double(in.q) + 2.0)) * s;
  } else {
    rep.partial = true;
  }

  auto holds = [&](const std::optional<double>& rhs) {
    return !rhs || realized_error <= *rhs + slack;
  };
  rep.gap_dep_holds = holds(rep.gap_dep_rhs);
  rep.gap_indep_holds = holds(rep.gap_indep_rhs);
  rep.prob_gap_dep_holds = holds(rep.prob_gap_dep_rhs);
  rep.prob_gap_indep_holds = holds(rep.prob_gap_indep_rhs);
  return rep;
}

InterlacingReport gamma_interlacing_check(const DenseMatrix& T, const ExactGsvd& truth,
                                          Index k) {
  const Index n = T.rows();
  if (k < 1 || k >= n) throw std::invalid_argument("gamma_interlacing_check: bad k");

  Eigen::SelfAdjointEigenSolver<Matrix> et(0.5 * (T.eigen() + T.eigen().transpose()));
  const Vector lam = et.eigenvalues().reverse();  // descending

  const Matrix T2 = T.eigen() * T.eigen();
  const Matrix Vk = truth.V_k(k), Vp = truth.V_perp(k);
  const Matrix G1 = Vk.transpose() * T2 * Vk;
  const Matrix G2 = Vp.transpose() * T2 * Vp;
  Eigen::SelfAdjointEigenSolver<Matrix> e1(0.5 * (G1 + G1.transpose()));
  Eigen::SelfAdjointEigenSolver<Matrix> e2(0.5 * (G2 + G2.transpose()));

  InterlacingReport rep;
  rep.lower = lam(k) / lam(k - 1);
  rep.middle = e2.eigenvalues().maxCoeff() / e1.eigenvalues().minCoeff();
  rep.upper = lam(0) / lam(n - 1);
  rep.passed = rep.lower <= rep.middle * (1.0 + 1e-10) &&
               rep.middle <= rep.upper * (1.0 + 1e-10);
  return rep;
}

Vector sensitivity_indices(const GsvdFactors& f, const SpdOp& T,
                           const DenseMatrix& basis) {
  if (basis.rows() != T.dim() || basis.rows() != f.V.rows()) {
    throw DimensionError("sensitivity_indices: basis rows must match the parameter space");
  }
  const Index nb = basis.cols();
  Vector out(nb);
  for (Index i = 0; i < nb; ++i) {
    const Vector theta = basis.eigen().col(i);
    if (theta.norm() == 0.0) {
      throw std::invalid_argument("sensitivity_indices: zero basis column " +
                                  std::to_string(i));
    }
    const Vector ttheta = T.apply(theta);
    const double tnorm = std::sqrt(std::max(theta.dot(ttheta), 0.0));
    const Vector y = f.sigma.asDiagonal() * (f.V.eigen().transpose() * ttheta);
    out(i) = y.norm() / tnorm;
  }
  return out;
}

}  // namespace gsvd
