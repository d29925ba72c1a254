#include <doctest.h>

#include "gsvd/reference.hpp"
#include "gsvd/sampling.hpp"
#include "gsvd/test_matrices.hpp"

using namespace gsvd;

namespace {

Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  Matrix M(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = rng::normal(seed, 902, i, j);
  return M;
}

// Independent transform path: matrix square roots via symmetric
// eigendecompositions, sigma_j = s_j(S^{1/2} A T^{-1/2}).
Vector sigma_via_sqrt_path(const Matrix& A, const Matrix& S, const Matrix& T) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S), et(T);
  const Matrix Shalf = es.operatorSqrt();
  const Matrix Tinvhalf = et.operatorInverseSqrt();
  return Eigen::BDCSVD<Matrix>(Matrix(Shalf * A * Tinvhalf)).singularValues();
}

double orthogonality_residual(const Matrix& U, const Matrix& W) {
  return (U.transpose() * W * U - Matrix::Identity(U.cols(), U.cols())).norm();
}

}  // namespace

TEST_CASE("identity weights reduce to the ordinary SVD") {
  const Matrix A = random_matrix(6, 4, 1);
  ExactGsvd g = exact_gsvd(DenseMatrix(A), DenseMatrix::identity(6),
                           DenseMatrix::identity(4));
  const Vector s = Eigen::BDCSVD<Matrix>(A).singularValues();
  CHECK((g.sigma - s).cwiseAbs().maxCoeff() <= 1e-13 * s(0));
  CHECK(orthogonality_residual(g.U.eigen(), Matrix::Identity(6, 6)) <= 1e-12);
}

TEST_CASE("scaling weights scale the singular values") {
  // A = I2, S = 4I, T = I: sigma_j = 2
  ExactGsvd g = exact_gsvd(DenseMatrix::identity(2),
                           DenseMatrix::from_rows({{4, 0}, {0, 4}}),
                           DenseMatrix::identity(2));
  CHECK(g.sigma(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.sigma(1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("two transform paths agree on random weighted instances") {
  const Matrix A = random_matrix(7, 5, 9);
  const DenseMatrix S = make_randsvd_spd(7, 300.0, SpectrumMode::log_uniform, 3);
  const DenseMatrix T = make_randsvd_spd(5, 200.0, SpectrumMode::log_uniform, 4);
  ExactGsvd g = exact_gsvd(DenseMatrix(A), S, T);
  const Vector s2 = sigma_via_sqrt_path(A, S.eigen(), T.eigen());
  CHECK((g.sigma - s2).cwiseAbs().maxCoeff() <= 1e-11 * g.sigma(0));
}

TEST_CASE("exact_gsvd invariants: reconstruction and weighted orthogonality") {
  const Index m = 9, n = 6;
  const Matrix A = random_matrix(m, n, 21);
  const DenseMatrix S = make_randsvd_spd(m, 100.0, SpectrumMode::log_uniform, 5);
  const DenseMatrix T = make_randsvd_spd(n, 100.0, SpectrumMode::log_uniform, 6);
  ExactGsvd g = exact_gsvd(DenseMatrix(A), S, T);

  CHECK(orthogonality_residual(g.U.eigen(), S.eigen()) <= 1e-11);
  CHECK(orthogonality_residual(g.V.eigen(), T.eigen()) <= 1e-11);
  Matrix Sig = Matrix::Zero(m, n);
  for (Index j = 0; j < std::min(m, n); ++j) Sig(j, j) = g.sigma(j);
  CHECK((g.U.eigen() * Sig * g.V.eigen().transpose() * T.eigen() - A).norm() <=
        1e-11 * A.norm());
  for (Index j = 1; j < g.sigma.size(); ++j) CHECK(g.sigma(j) <= g.sigma(j - 1));
}

TEST_CASE("oracle refuses beyond the size cap") {
  CHECK_THROWS_AS(
      exact_gsvd(DenseMatrix(kOracleSizeCap + 1, 4), DenseMatrix::identity(kOracleSizeCap + 1),
                 DenseMatrix::identity(4)),
      std::invalid_argument);
}

TEST_CASE("sandwich inequalities") {
  {
    // identity weights: both inequalities are equalities
    const Matrix A = random_matrix(5, 5, 2);
    SandwichReport rep = singular_value_sandwich_check(
        DenseMatrix(A), DenseMatrix::identity(5), DenseMatrix::identity(5));
    CHECK(rep.passed);
    CHECK((rep.lower - rep.sigma).cwiseAbs().maxCoeff() <= 1e-12 * rep.sigma(0));
    CHECK((rep.upper - rep.sigma).cwiseAbs().maxCoeff() <= 1e-12 * rep.sigma(0));
  }
  {
    // S = cI: sigma_j = sqrt(c) s_j exactly
    const Matrix A = random_matrix(4, 4, 3);
    const double c = 9.0;
    SandwichReport rep = singular_value_sandwich_check(
        DenseMatrix(A), DenseMatrix(Matrix(c * Matrix::Identity(4, 4))),
        DenseMatrix::identity(4));
    const Vector s = Eigen::BDCSVD<Matrix>(A).singularValues();
    CHECK(rep.passed);
    CHECK((rep.sigma - std::sqrt(c) * s).cwiseAbs().maxCoeff() <= 1e-12 * rep.sigma(0));
  }
  {
    const Matrix A = random_matrix(10, 8, 4);
    const DenseMatrix S = make_randsvd_spd(10, 100.0, SpectrumMode::log_uniform, 7);
    const DenseMatrix T = make_randsvd_spd(8, 100.0, SpectrumMode::log_uniform, 8);
    SandwichReport rep = singular_value_sandwich_check(DenseMatrix(A), S, T);
    CHECK(rep.passed);
    CHECK(rep.first_violation == -1);
  }
}

TEST_CASE("exact_gheig basics") {
  {
    const DenseMatrix A = make_randsvd_spd(5, 50.0, SpectrumMode::log_uniform, 11);
    ExactGheig e = exact_gheig(A, A);
    CHECK((e.values.array() - 1.0).abs().maxCoeff() <= 1e-10);
  }
  {
    ExactGheig e = exact_gheig(DenseMatrix::from_rows({{4, 0}, {0, 1}}),
                               DenseMatrix::identity(2));
    CHECK(e.values(0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exact_gheig residuals and B-orthonormality") {
  const Index n = 12;
  const DenseMatrix A = make_randsvd_spd(n, 1000.0, SpectrumMode::log_uniform, 13);
  const DenseMatrix B = make_randsvd_spd(n, 100.0, SpectrumMode::log_uniform, 14);
  ExactGheig e = exact_gheig(A, B);
  CHECK(orthogonality_residual(e.vectors.eigen(), B.eigen()) <= 1e-11);
  for (Index j = 0; j < n; ++j) {
    const Vector v = e.vectors.eigen().col(j);
    const Vector resid = A.eigen() * v - e.values(j) * (B.eigen() * v);
    CHECK(resid.norm() <= 1e-10 * A.eigen().norm());
  }
  for (Index j = 1; j < n; ++j) CHECK(e.values(j) <= e.values(j - 1));
}

TEST_CASE("exact_gheig rejects asymmetry") {
  CHECK_THROWS_AS(
      exact_gheig(DenseMatrix::from_rows({{1, 1}, {0, 1}}), DenseMatrix::identity(2)),
      std::invalid_argument);
}

TEST_CASE("route consistency: gsvd squared equals the gheig spectrum") {
  const Index m = 10, n = 8;
  const Matrix A = random_matrix(m, n, 31);
  const DenseMatrix S = make_randsvd_spd(m, 50.0, SpectrumMode::log_uniform, 15);
  const DenseMatrix T = make_randsvd_spd(n, 50.0, SpectrumMode::log_uniform, 16);
  ExactGsvd g = exact_gsvd(DenseMatrix(A), S, T);
  const Matrix P = A.transpose() * S.eigen() * A;
  ExactGheig e = exact_gheig(DenseMatrix(Matrix(0.5 * (P + P.transpose()))), T);
  for (Index j = 0; j < n / 2; ++j) {
    CHECK(std::sqrt(std::max(e.values(j), 0.0)) ==
          doctest::Approx(g.sigma(j)).epsilon(1e-8));
  }
}
