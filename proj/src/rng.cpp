#include "proxmo/rng.hpp"

#include <cmath>

namespace proxmo {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t run_index) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ull * (run_index + 1));
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1]: shift the canonical [0, 1) draw away from zero so the log is
  // finite. u2 in [0, 1).
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * kScale;
  const double u2 = static_cast<double>(gen_() >> 11) * kScale;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Vector NormalStream::vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = next();
  return v;
}

Matrix NormalStream::matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = next();
  }
  return m;
}

}  // namespace proxmo
