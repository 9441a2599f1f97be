// Shared construction helpers for the test suites. Oracles (independent
// re-computations of expected values) live in the individual test files; this
// header only builds inputs.
#ifndef PROXMO_TESTS_HELPERS_HPP
#define PROXMO_TESTS_HELPERS_HPP

#include <random>
#include <vector>

#include "proxmo/problem.hpp"

namespace proxmo_tests {

using proxmo::AffinePiece;
using proxmo::Index;
using proxmo::Matrix;
using proxmo::PiecewiseAffine;
using proxmo::ProblemInstance;
using proxmo::QuadraticObjective;
using proxmo::Vector;

inline Vector random_vector(std::mt19937_64& gen, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(gen);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& gen, Index rows, Index cols,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = normal(gen);
  }
  return M;
}

/// M M' + floor*I: symmetric positive definite by construction.
inline Matrix random_spd(std::mt19937_64& gen, Index n, double floor = 1e-3) {
  const Matrix M = random_matrix(gen, n, n);
  return M * M.transpose() + floor * Matrix::Identity(n, n);
}

inline Vector random_simplex(std::mt19937_64& gen, Index P) {
  std::uniform_real_distribution<double> unif(1e-12, 1.0);
  Vector lambda(P);
  for (Index i = 0; i < P; ++i) lambda[i] = -std::log(unif(gen));
  return lambda / lambda.sum();
}

/// Random piecewise-affine h with `pieces` affine pieces.
inline PiecewiseAffine random_h(std::mt19937_64& gen, Index n, int pieces) {
  std::vector<AffinePiece> list;
  for (int j = 0; j < pieces; ++j) {
    list.push_back(AffinePiece{random_vector(gen, n), random_vector(gen, 1)[0]});
  }
  return PiecewiseAffine(std::move(list));
}

/// Random instance: SPD quadratics plus random affine-max nonsmooth parts.
inline ProblemInstance random_instance(std::mt19937_64& gen, Index n, Index m,
                                       int pieces_per_h) {
  std::vector<QuadraticObjective> smooth;
  std::vector<PiecewiseAffine> nonsmooth;
  for (Index i = 0; i < m; ++i) {
    smooth.emplace_back(random_spd(gen, n), random_vector(gen, n));
    nonsmooth.push_back(random_h(gen, n, pieces_per_h));
  }
  return ProblemInstance(std::move(smooth), std::move(nonsmooth));
}

/// m objectives, all h identically zero.
inline ProblemInstance random_smooth_instance(std::mt19937_64& gen, Index n, Index m) {
  std::vector<QuadraticObjective> smooth;
  std::vector<PiecewiseAffine> nonsmooth;
  for (Index i = 0; i < m; ++i) {
    smooth.emplace_back(random_spd(gen, n), random_vector(gen, n));
    nonsmooth.push_back(PiecewiseAffine::zero(n));
  }
  return ProblemInstance(std::move(smooth), std::move(nonsmooth));
}

}  // namespace proxmo_tests

#endif  // PROXMO_TESTS_HELPERS_HPP
