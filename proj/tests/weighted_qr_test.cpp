#include <doctest.h>

#include "gsvd/linalg.hpp"
#include "gsvd/sampling.hpp"
#include "gsvd/test_matrices.hpp"
#include "gsvd/weighted_qr.hpp"

using namespace gsvd;

namespace {

using LdMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  Matrix M(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = rng::normal(seed, 901, i, j);
  return M;
}

// Gram-Schmidt in the W inner product with re-orthogonalization, long double
// accumulation. Oracle only; R diagonal positive matches the library's sign
// convention.
void mgs_w(const Matrix& Zd, const Matrix& Wd, Matrix& Qout, Matrix& Rout) {
  const Index n = Zd.cols();
  LdMatrix Z = Zd.cast<long double>(), W = Wd.cast<long double>();
  LdMatrix Q = Z;
  for (Index j = 0; j < n; ++j) {
    Eigen::Matrix<long double, Eigen::Dynamic, 1> v = Z.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        v -= (Q.col(i).dot(W * v)) * Q.col(i);
      }
    }
    const long double nrm = std::sqrt((long double)(v.dot(W * v)));
    Q.col(j) = v / nrm;
  }
  LdMatrix R = Q.transpose() * (W * Z);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) R(i, j) = 0.0L;
  Qout = Q.cast<double>();
  Rout = R.cast<double>();
}

// Classical CholQR (no pre-QR), one pass. Oracle for the refinement test.
Matrix classical_cholqr(const Matrix& Z) {
  Matrix G = Z.transpose() * Z;
  G = 0.5 * (G + G.transpose()).eval();
  Matrix L = G;
  if (linalg::cholesky_lower_inplace(L) >= 0) throw std::runtime_error("oracle chol");
  return linalg::right_solve_upper(Z, Matrix(L.transpose()));
}

double ortho_residual(const Matrix& Q, const Matrix& W) {
  const Index n = Q.cols();
  return linalg::spectral_norm(Matrix(Q.transpose() * W * Q - Matrix::Identity(n, n)));
}

}  // namespace

TEST_CASE("identity and diagonal inputs") {
  SpdDenseOp I3(DenseMatrix::identity(3));
  WeightedQrResult r = weighted_cholqr(DenseMatrix::identity(3), I3, false);
  CHECK((r.Q.eigen() - Matrix::Identity(3, 3)).norm() <= 1e-15);
  CHECK((r.R.eigen() - Matrix::Identity(3, 3)).norm() <= 1e-15);

  SpdDenseOp I2(DenseMatrix::identity(2));
  WeightedQrResult d =
      weighted_cholqr(DenseMatrix::from_rows({{2, 0}, {0, 3}}), I2, false);
  CHECK((d.Q.eigen() - Matrix::Identity(2, 2)).norm() <= 1e-15);
  CHECK(d.R(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d.R(1, 1) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("random input against the W-inner-product Gram-Schmidt oracle") {
  const Matrix Z = random_matrix(10, 4, 12);
  const DenseMatrix Wd = make_minij(10);
  SpdDenseOp W(Wd);
  WeightedQrResult r = weighted_cholqr(DenseMatrix(Z), W, true);

  CHECK(ortho_residual(r.Q.eigen(), Wd.eigen()) <= 1e-11);
  CHECK((r.Q.eigen() * r.R.eigen() - Z).norm() <= 1e-12 * Z.norm());
  CHECK((r.WQ->eigen() - Wd.eigen() * r.Q.eigen()).norm() <=
        1e-10 * (Wd.eigen() * r.Q.eigen()).norm());

  Matrix Qo, Ro;
  mgs_w(Z, Wd.eigen(), Qo, Ro);
  CHECK((r.Q.eigen() - Qo).norm() <= 1e-9 * Qo.norm());
  CHECK((r.R.eigen() - Ro).norm() <= 1e-9 * Ro.norm());
}

TEST_CASE("R diagonal is positive and the factorization is deterministic") {
  const Matrix Z = random_matrix(12, 5, 77);
  SpdDenseOp W(make_minij(12));
  WeightedQrResult a = weighted_cholqr(DenseMatrix(Z), W, false);
  WeightedQrResult b = weighted_cholqr(DenseMatrix(Z), W, false);
  for (Index j = 0; j < 5; ++j) CHECK(a.R(j, j) > 0.0);
  CHECK((a.Q.eigen() - b.Q.eigen()).norm() == 0.0);
  CHECK((a.R.eigen() - b.R.eigen()).norm() == 0.0);
}

TEST_CASE("exactly n applies of the weight per call") {
  SpdDenseOp W(make_minij(9));
  weighted_cholqr(DenseMatrix(random_matrix(9, 4, 5)), W, false);
  CHECK(W.apply_count() == 4);
  weighted_cholqr(DenseMatrix(random_matrix(9, 6, 6)), W, true);
  CHECK(W.apply_count() == 10);
  CHECK(W.solve_count() == 0);
}

TEST_CASE("range is preserved: projector reproduces Z") {
  const Matrix Z = random_matrix(14, 5, 31);
  const DenseMatrix Wd = make_randsvd_spd(14, 1e3, SpectrumMode::log_uniform, 9);
  SpdDenseOp W(Wd);
  WeightedQrResult r = weighted_cholqr(DenseMatrix(Z), W, false);
  const Matrix P = r.Q.eigen() * r.Q.eigen().transpose() * Wd.eigen();
  CHECK((P * Z - Z).norm() <= 1e-10 * Z.norm());
}

TEST_CASE("rank deficiency fails loudly with the column index") {
  Matrix Z = random_matrix(8, 4, 3);
  Z.col(3) = Z.col(1);  // exact duplicate
  SpdDenseOp W(DenseMatrix::identity(8));
  try {
    weighted_cholqr(DenseMatrix(Z), W, false);
    FAIL("expected RankDeficiencyError");
  } catch (const RankDeficiencyError& e) {
    CHECK(e.column() == 3);
  }
}

TEST_CASE("reorthogonalize is a fixed point on orthonormal input") {
  SpdDenseOp W(DenseMatrix::identity(10));
  WeightedQrResult r = weighted_cholqr(DenseMatrix(random_matrix(10, 4, 8)), W, false);
  WeightedQrResult r2 = reorthogonalize(r, W);
  CHECK((r2.Q.eigen() - r.Q.eigen()).norm() <= 1e-14 * r.Q.eigen().norm());
  // composed R still factors the original input
  const Matrix Z = random_matrix(10, 4, 8);
  CHECK((r2.Q.eigen() * r2.R.eigen() - Z).norm() <= 1e-12 * Z.norm());
}

TEST_CASE("one refinement pass fixes a kappa(Z) = 1e8 input") {
  Matrix Z = random_matrix(30, 6, 15);
  Vector scales(6);
  for (Index j = 0; j < 6; ++j) scales(j) = std::pow(1e8, -double(j) / 5.0);
  Z = Z * scales.asDiagonal();
  SpdDenseOp W(DenseMatrix::identity(30));
  WeightedQrResult r = weighted_cholqr(DenseMatrix(Z), W, false);
  WeightedQrResult r2 = reorthogonalize(r, W);
  const double post = ortho_residual(r2.Q.eigen(), Matrix::Identity(30, 30));
  CHECK(post <= 1e-12);
  CHECK((post <= ortho_residual(r.Q.eigen(), Matrix::Identity(30, 30)) || post <= 1e-13));

  // two-pass classical CholQR oracle lands in the same regime
  const Matrix Qc = classical_cholqr(classical_cholqr(Z));
  const double oracle = ortho_residual(Qc, Matrix::Identity(30, 30));
  CHECK(post <= 10 * std::max(oracle, 1e-14));
}

TEST_CASE("ill-conditioned diagonal weight degrades gracefully") {
  const Matrix Z = random_matrix(24, 5, 44);
  Vector d(24);
  for (Index i = 0; i < 24; ++i) d(i) = std::pow(1e6, 1.0 - double(i) / 23.0);
  SpdDenseOp Wbig{DenseMatrix(Matrix(d.asDiagonal()))};
  SpdDenseOp Wid(DenseMatrix::identity(24));

  const double res_id =
      ortho_residual(weighted_cholqr(DenseMatrix(Z), Wid, false).Q.eigen(),
                     Matrix::Identity(24, 24));
  const double res_big = ortho_residual(
      weighted_cholqr(DenseMatrix(Z), Wbig, false).Q.eigen(), Matrix(d.asDiagonal()));
  CHECK(res_big <= 10 * std::max(res_id, 1e-15));
}

TEST_CASE("residual estimate tracks the true residual") {
  const Matrix Z = random_matrix(20, 6, 91);
  const DenseMatrix Wd = make_randsvd_spd(20, 1e4, SpectrumMode::log_uniform, 13);
  SpdDenseOp W(Wd);
  WeightedQrResult r = weighted_cholqr(DenseMatrix(Z), W, false);
  const double true_res = ortho_residual(r.Q.eigen(), Wd.eigen());
  CHECK(r.ortho_residual_estimate <= 100 * std::max(true_res, 1e-15));
  CHECK(r.ortho_residual_estimate < kReorthThreshold);
}
