#ifndef PROXMO_RNG_HPP
#define PROXMO_RNG_HPP

#include <cstdint>
#include <random>

#include "proxmo/problem.hpp"

namespace proxmo {

/// splitmix64: the 64-bit mixing function used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t z);

/// Seed for the stream of run `run_index` under master seed `seed`.
/// Defined as splitmix64(seed + 0x9E3779B97F4A7C15 * (run_index + 1)) so that
/// streams are decorrelated and the mapping is stable across platforms.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t run_index);

/// Deterministic standard-normal stream: mt19937_64 + Box-Muller.
///
/// Draw order is pinned for reproducibility: each pair of normals is computed
/// from two uniforms u1 in (0,1], u2 in [0,1) as
///   r = sqrt(-2 ln u1), z1 = r cos(2 pi u2), z2 = r sin(2 pi u2),
/// with z1 returned first. Matrices fill row-major, vectors front to back.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

  double next();
  Vector vector(Index n);
  Matrix matrix(Index rows, Index cols);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace proxmo

#endif  // PROXMO_RNG_HPP
