#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "gsvd/dense_matrix.hpp"
#include "gsvd/operators.hpp"

namespace gsvd {

/// Counter-based random numbers: Philox4x32-10 keyed by the seed, with a
/// Box-Muller transform for N(0,1) draws. Every value is a pure function of
/// (seed, stream, i, j), so matrix entries can be generated in any order --
/// in particular column-parallel -- with bitwise-stable results.
namespace rng {

inline constexpr const char* kName = "philox4x32-10/box-muller";

/// Distinct stream ids for the library's internal consumers, so their draws
/// never collide at a shared user seed.
enum Stream : std::uint64_t {
  kSketch = 0,
  kTestMatrix = 1,
  kSpdSpectrum = 2,
  kHaar = 3,
  kInexact = 1u << 16,  // InexactOp call streams count up from here
};

/// Sub-seed for a second sketch coupled to `seed` (two-sided route).
inline constexpr std::uint64_t kSubSeedXor = 0x9E3779B97F4A7C15ull;

std::uint64_t philox2x32(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t i, std::uint64_t j);

/// Uniform draw in (0, 1].
double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t i, std::uint64_t j);

/// Standard normal draw.
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t i, std::uint64_t j);

/// Uniform integer in [0, bound).
std::uint64_t below(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                    std::uint64_t j, std::uint64_t bound);

}  // namespace rng

/// Factor L of an approximate inverse T^{-1} ~ L L^T, applied matrix-free.
struct Preconditioner {
  Index n = 0;
  std::function<Vector(const Vector&)> apply_L;
  std::function<Vector(const Vector&)> apply_Lt;
};

/// Which test matrix distribution to draw, plus the seed that pins it down.
struct SamplerSpec {
  enum class Kind { gaussian, preconditioned };
  Kind kind = Kind::gaussian;
  std::uint64_t seed = 0;
  std::shared_ptr<const Preconditioner> precond;  // required iff preconditioned

  std::string describe() const;
  void validate() const;
};

/// n-by-l matrix of i.i.d. N(0,1) entries. Deterministic in the seed.
DenseMatrix draw_gaussian(Index n, Index l, std::uint64_t seed);

/// Omega = L G with G standard Gaussian: columns are N(0, L L^T) samples.
/// With the identity preconditioner this reproduces draw_gaussian exactly.
DenseMatrix draw_preconditioned(Index n, Index l, std::uint64_t seed,
                                const Preconditioner& P);

/// Dispatch on the sampler kind.
DenseMatrix draw(const SamplerSpec& spec, Index n, Index l);

Preconditioner identity_preconditioner(Index n);

/// L = diag(T)^{-1/2}, read off with n basis probes of T.
Preconditioner jacobi_preconditioner(const SpdOp& T);

/// L = L_T^{-T} from a dense Cholesky of T, so L L^T = T^{-1} and the
/// preconditioned weight L^T T L is the identity. Desk scale only.
Preconditioner exact_preconditioner(const SpdOp& T);

}  // namespace gsvd
