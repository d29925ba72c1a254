#include "gsvd/sampling.hpp"

#include <cmath>

#include "gsvd/linalg.hpp"

namespace gsvd {

namespace rng {
namespace {

struct Block {
  std::uint32_t c[4];
};

inline Block philox4x32_10(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                           std::uint32_t c3, std::uint32_t k0, std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = 0xD2511F53ull * c0;
    const std::uint64_t p1 = 0xCD9E8D57ull * c2;
    const std::uint32_t n0 = std::uint32_t(p1 >> 32) ^ c1 ^ k0;
    const std::uint32_t n1 = std::uint32_t(p1);
    const std::uint32_t n2 = std::uint32_t(p0 >> 32) ^ c3 ^ k1;
    const std::uint32_t n3 = std::uint32_t(p0);
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
  return Block{{c0, c1, c2, c3}};
}

inline Block block(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                   std::uint64_t j) {
  // Fold the high halves of (i, j) into the stream so 64-bit indices stay
  // collision free at the sizes this library handles.
  const std::uint64_t s = stream ^ (i >> 32 << 16) ^ (j >> 32);
  return philox4x32_10(std::uint32_t(i), std::uint32_t(j), std::uint32_t(s),
                       std::uint32_t(s >> 32), std::uint32_t(seed),
                       std::uint32_t(seed >> 32));
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t x = (std::uint64_t(hi) << 32) | lo;
  return double((x >> 11) + 1) * 0x1.0p-53;  // (0, 1]
}

}  // namespace

std::uint64_t philox2x32(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                         std::uint64_t j) {
  const Block b = block(seed, stream, i, j);
  return (std::uint64_t(b.c[0]) << 32) | b.c[1];
}

double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
               std::uint64_t j) {
  const Block b = block(seed, stream, i, j);
  return to_unit(b.c[0], b.c[1]);
}

double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
              std::uint64_t j) {
  const Block b = block(seed, stream, i, j);
  const double u1 = to_unit(b.c[0], b.c[1]);
  const double u2 = to_unit(b.c[2], b.c[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t below(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                    std::uint64_t j, std::uint64_t bound) {
  return philox2x32(seed, stream, i, j) % bound;
}

}  // namespace rng

std::string SamplerSpec::describe() const {
  std::string s = kind == Kind::gaussian ? "gaussian" : "preconditioned";
  return s + "(" + rng::kName + ")";
}

void SamplerSpec::validate() const {
  if (kind == Kind::preconditioned && !precond) {
    throw std::invalid_argument("SamplerSpec: preconditioned sampler needs a preconditioner");
  }
}

DenseMatrix draw_gaussian(Index n, Index l, std::uint64_t seed) {
  if (n < 1 || l < 1) throw std::invalid_argument("draw_gaussian: dimensions must be >= 1");
  Matrix G(n, l);
  for (Index j = 0; j < l; ++j) {
    for (Index i = 0; i < n; ++i) {
      G(i, j) = rng::normal(seed, rng::kSketch, std::uint64_t(i), std::uint64_t(j));
    }
  }
  return DenseMatrix(std::move(G));
}

DenseMatrix draw_preconditioned(Index n, Index l, std::uint64_t seed,
                                const Preconditioner& P) {
  if (P.n != n) throw DimensionError("draw_preconditioned: preconditioner size mismatch");
  DenseMatrix G = draw_gaussian(n, l, seed);
  Matrix Om(n, l);
  for (Index j = 0; j < l; ++j) Om.col(j) = P.apply_L(G.eigen().col(j));
  return DenseMatrix(std::move(Om));
}

DenseMatrix draw(const SamplerSpec& spec, Index n, Index l) {
  spec.validate();
  if (spec.kind == SamplerSpec::Kind::gaussian) return draw_gaussian(n, l, spec.seed);
  return draw_preconditioned(n, l, spec.seed, *spec.precond);
}

Preconditioner identity_preconditioner(Index n) {
  Preconditioner P;
  P.n = n;
  P.apply_L = [](const Vector& x) { return x; };
  P.apply_Lt = [](const Vector& x) { return x; };
  return P;
}

Preconditioner jacobi_preconditioner(const SpdOp& T) {
  const Index n = T.dim();
  Vector scale(n);
  Vector e = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    e(i) = 1.0;
    const double d = T.apply(e)(i);
    e(i) = 0.0;
    if (!(d > 0.0)) throw NotPositiveDefiniteError("jacobi_preconditioner", i);
    scale(i) = 1.0 / std::sqrt(d);
  }
  Preconditioner P;
  P.n = n;
  P.apply_L = [scale](const Vector& x) { return Vector(scale.asDiagonal() * x); };
  P.apply_Lt = P.apply_L;
  return P;
}

Preconditioner exact_preconditioner(const SpdOp& T) {
  const Matrix W = materialize(T).eigen();
  auto L = std::make_shared<Matrix>(
      linalg::cholesky_lower(0.5 * (W + W.transpose()), "exact_preconditioner"));
  Preconditioner P;
  P.n = T.dim();
  P.apply_L = [L](const Vector& x) {
    return Vector(L->triangularView<Eigen::Lower>().transpose().solve(x));
  };
  P.apply_Lt = [L](const Vector& x) {
    return Vector(L->triangularView<Eigen::Lower>().solve(x));
  };
  return P;
}

}  // namespace gsvd
