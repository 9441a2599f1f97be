#include "proxmo/uncertainty.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "proxmo/errors.hpp"

namespace proxmo {

namespace {

constexpr double kFeasSlack = 1e-9;
constexpr double kDedupe = 1e-9;
constexpr double kSubsetBudget = 1e6;

/// Appends v unless an equal point (within kDedupe) is already present.
void dedupe_insert(std::vector<Vector>& out, const Vector& v) {
  for (const auto& w : out) {
    if ((w - v).cwiseAbs().maxCoeff() <= kDedupe) return;
  }
  out.push_back(v);
}

double binomial_guard(Index rows, Index n) {
  double count = 1.0;
  for (Index i = 0; i < n; ++i) {
    count *= static_cast<double>(rows - i) / static_cast<double>(i + 1);
    if (count > kSubsetBudget) return count;
  }
  return count;
}

}  // namespace

std::vector<Vector> box_vertices(Index n, double delta) {
  if (n < 1) throw std::invalid_argument("box_vertices: n must be >= 1");
  if (n > 20) {
    throw CapacityError("box_vertices: n = " + std::to_string(n) +
                        " exceeds the 2^20 vertex budget (n <= 20)");
  }
  if (delta < 0) throw std::invalid_argument("box_vertices: delta must be >= 0");
  std::vector<Vector> vertices;
  if (delta == 0.0) {
    vertices.push_back(Vector::Zero(n));
    return vertices;
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  vertices.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Vector v(n);
    for (Index j = 0; j < n; ++j) {
      const bool negative = (k >> (n - 1 - j)) & 1u;
      v[j] = negative ? -delta : delta;
    }
    vertices.push_back(std::move(v));
  }
  return vertices;
}

std::vector<Vector> transformed_box_vertices(const Matrix& B, double delta) {
  if (B.rows() != B.cols()) {
    throw std::invalid_argument("transformed_box_vertices: B must be square");
  }
  Eigen::FullPivLU<Matrix> lu(B);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible() || !(lu.rcond() > 1e-10)) {
    throw SingularMatrixError(
        "transformed_box_vertices: B is singular or ill conditioned (rcond <= 1e-10)");
  }
  std::vector<Vector> vertices;
  for (const auto& v : box_vertices(B.rows(), delta)) {
    vertices.push_back(lu.solve(v));
  }
  return vertices;
}

std::vector<Vector> hpolytope_vertices(const Matrix& A, const Vector& b) {
  const Index rows = A.rows();
  const Index n = A.cols();
  if (rows != b.size()) {
    throw std::invalid_argument("hpolytope_vertices: A and b row counts differ");
  }
  if (rows < n) {
    throw InvalidSetError("hpolytope_vertices: fewer constraints than dimensions, set unbounded");
  }
  if (binomial_guard(rows, n) > kSubsetBudget) {
    throw CapacityError("hpolytope_vertices: C(rows, n) exceeds the 1e6 subset budget");
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());

  // A recession line exists iff A has a nontrivial null space.
  Eigen::FullPivLU<Matrix> full_lu(A);
  full_lu.setThreshold(1e-10);
  if (full_lu.rank() < n) {
    throw InvalidSetError("hpolytope_vertices: A is rank deficient, set unbounded");
  }

  // Enumerate candidate extreme rays: each (n-1)-subset of rows with a
  // one-dimensional null space contributes a direction r; if Ar <= 0 (either
  // sign) the recession cone is nontrivial and the set is unbounded.
  if (n == 1) {
    const Vector Ar = A * Vector::Ones(1);
    if (Ar.maxCoeff() <= kFeasSlack * scale || (-Ar).maxCoeff() <= kFeasSlack * scale) {
      throw InvalidSetError("hpolytope_vertices: unbounded recession direction detected");
    }
  }
  if (n >= 2 && binomial_guard(rows, n - 1) > kSubsetBudget) {
    throw CapacityError("hpolytope_vertices: C(rows, n-1) exceeds the 1e6 subset budget");
  }
  if (n >= 2) {
    std::vector<Index> subset(n - 1);
    for (Index i = 0; i < n - 1; ++i) subset[i] = i;
    while (true) {
      Matrix S(n - 1, n);
      for (Index i = 0; i < n - 1; ++i) S.row(i) = A.row(subset[i]);
      Eigen::FullPivLU<Matrix> slu(S);
      slu.setThreshold(1e-10);
      if (slu.rank() == n - 1) {
        const Matrix kernel = slu.kernel();
        Vector r = kernel.col(0);
        const double rn = r.norm();
        if (rn > 0) {
          r /= rn;
          const Vector Ar = A * r;
          if (Ar.maxCoeff() <= kFeasSlack * scale || (-Ar).maxCoeff() <= kFeasSlack * scale) {
            throw InvalidSetError(
                "hpolytope_vertices: unbounded recession direction detected");
          }
        }
      }
      // next (n-1)-combination in lexicographic order
      Index pos = n - 2;
      while (pos >= 0 && subset[pos] == rows - (n - 1) + pos) --pos;
      if (pos < 0) break;
      ++subset[pos];
      for (Index i = pos + 1; i < n - 1; ++i) subset[i] = subset[i - 1] + 1;
    }
  }

  // Basic solutions: every n-subset of rows with a nonsingular system.
  std::vector<Vector> vertices;
  std::vector<Index> subset(n);
  for (Index i = 0; i < n; ++i) subset[i] = i;
  while (true) {
    Matrix S(n, n);
    Vector rhs(n);
    for (Index i = 0; i < n; ++i) {
      S.row(i) = A.row(subset[i]);
      rhs[i] = b[subset[i]];
    }
    Eigen::FullPivLU<Matrix> slu(S);
    slu.setThreshold(1e-10);
    if (slu.isInvertible()) {
      const Vector candidate = slu.solve(rhs);
      if (candidate.allFinite() && ((A * candidate - b).array() <= kFeasSlack * scale).all()) {
        dedupe_insert(vertices, candidate);
      }
    }
    Index pos = n - 1;
    while (pos >= 0 && subset[pos] == rows - n + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (Index i = pos + 1; i < n; ++i) subset[i] = subset[i - 1] + 1;
  }

  if (vertices.empty()) {
    throw InvalidSetError("hpolytope_vertices: feasible set is empty");
  }
  return vertices;
}

PiecewiseAffine support_function(const std::vector<Vector>& vertices) {
  if (vertices.empty()) {
    throw InvalidSetError("support_function: vertex list is empty");
  }
  std::vector<AffinePiece> pieces;
  pieces.reserve(vertices.size());
  for (const auto& v : vertices) {
    pieces.push_back(AffinePiece{v, 0.0});
  }
  return PiecewiseAffine(std::move(pieces));
}

}  // namespace proxmo
