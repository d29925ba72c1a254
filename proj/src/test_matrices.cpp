#include "gsvd/test_matrices.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gsvd/sampling.hpp"

namespace gsvd {

TestMatrixKind test_matrix_kind_from_name(const std::string& name) {
  if (name == "controlled_gap" || name == "gap") return TestMatrixKind::controlled_gap;
  if (name == "lowrank_noise" || name == "noise") return TestMatrixKind::lowrank_noise;
  if (name == "lowrank_decay") return TestMatrixKind::lowrank_decay;
  if (name == "decay") return TestMatrixKind::decay;
  throw std::invalid_argument("unknown test matrix kind '" + name + "'");
}

std::string to_string(TestMatrixKind kind) {
  switch (kind) {
    case TestMatrixKind::controlled_gap: return "controlled_gap";
    case TestMatrixKind::lowrank_noise: return "lowrank_noise";
    case TestMatrixKind::lowrank_decay: return "lowrank_decay";
    case TestMatrixKind::decay: return "decay";
  }
  return "?";
}

namespace {

// Sparse nonnegative random vector: a fixed count round(density*n) >= 1 of
// uniform entries at distinct seeded positions.
Vector sparse_random_vector(Index n, double density, std::uint64_t seed,
                            std::uint64_t stream) {
  const Index nnz = std::max<Index>(1, static_cast<Index>(std::llround(density * double(n))));
  Vector x = Vector::Zero(n);
  Index placed = 0;
  for (std::uint64_t t = 0; placed < nnz; ++t) {
    const Index pos = static_cast<Index>(
        rng::below(seed, stream, t, 0, static_cast<std::uint64_t>(n)));
    if (x(pos) != 0.0) continue;
    x(pos) = rng::uniform(seed, stream, t, 1);
    ++placed;
  }
  return x;
}

}  // namespace

DenseMatrix make_test_matrix(const TestMatrixSpec& spec) {
  const Index n = spec.n, r = spec.r;
  if (n < r) throw std::invalid_argument("make_test_matrix: need n >= r");
  switch (spec.kind) {
    case TestMatrixKind::controlled_gap: {
      Matrix A = Matrix::Zero(n, n);
      for (Index j = 1; j <= n; ++j) {
        const double c = (j <= r) ? spec.gap / double(j) : 1.0 / double(j);
        // x_j and y_j are independent draws (distinct streams)
        const Vector x = sparse_random_vector(
            n, spec.density, spec.seed, rng::kTestMatrix + 2 * std::uint64_t(j));
        const Vector y = sparse_random_vector(
            n, spec.density, spec.seed, rng::kTestMatrix + 2 * std::uint64_t(j) + 1);
        A.noalias() += c * x * y.transpose();
      }
      return DenseMatrix(std::move(A));
    }
    case TestMatrixKind::lowrank_noise: {
      Matrix A = Matrix::Zero(n, n);
      for (Index j = 0; j < r; ++j) A(j, j) = 1.0;
      Matrix G(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          G(i, j) = rng::normal(spec.seed, rng::kTestMatrix, std::uint64_t(i),
                                std::uint64_t(j));
      A += std::sqrt(spec.noise * double(r) / (2.0 * double(n) * double(n))) *
           (G + G.transpose());
      return DenseMatrix(std::move(A));
    }
    case TestMatrixKind::lowrank_decay: {
      Vector dvals(n);
      for (Index j = 0; j < r; ++j) dvals(j) = 1.0;
      for (Index j = r; j < n; ++j) dvals(j) = std::pow(double(j - r + 2), -spec.d);
      return DenseMatrix(Matrix(dvals.asDiagonal()));
    }
    case TestMatrixKind::decay: {
      Vector dvals(n);
      for (Index j = 0; j < n; ++j) dvals(j) = std::pow(0.9, double(j + 1));
      return DenseMatrix(Matrix(dvals.asDiagonal()));
    }
  }
  throw std::logic_error("make_test_matrix: unreachable");
}

DenseMatrix make_minij(Index n) {
  if (n < 1) throw std::invalid_argument("make_minij: need n >= 1");
  Matrix W(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) W(i, j) = double(std::min(i, j) + 1);
  return DenseMatrix(std::move(W));
}

DenseMatrix make_randsvd_spd(Index n, double kappa, SpectrumMode mode,
                             std::uint64_t seed) {
  if (kappa < 1.0) throw std::invalid_argument("make_randsvd_spd: need kappa >= 1");
  // Haar orthogonal factor: QR of a Gaussian matrix, R diagonal signs fixed
  Matrix G(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      G(i, j) = rng::normal(seed, rng::kHaar, std::uint64_t(i), std::uint64_t(j));
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix R = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }

  std::vector<double> d(static_cast<std::size_t>(n));
  if (n == 1) {
    d[0] = 1.0;
  } else {
    d[0] = 1.0;
    d[static_cast<std::size_t>(n) - 1] = 1.0 / kappa;
    for (Index j = 1; j + 1 < n; ++j) {
      double t;
      if (mode == SpectrumMode::log_uniform) {
        t = rng::uniform(seed, rng::kSpdSpectrum, std::uint64_t(j), 0);
      } else {
        t = double(j) / double(n - 1);
      }
      d[static_cast<std::size_t>(j)] = std::pow(kappa, -t);
    }
    std::sort(d.begin(), d.end(), std::greater<double>());
  }
  Vector dv = Eigen::Map<Vector>(d.data(), n);
  const Matrix M = Q * dv.asDiagonal() * Q.transpose();
  return DenseMatrix(Matrix(0.5 * (M + M.transpose())));
}

Index numerical_rank(const DenseMatrix& M, double rel_tol) {
  const Vector s = Eigen::BDCSVD<Matrix>(M.eigen()).singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
  return r;
}

}  // namespace gsvd
