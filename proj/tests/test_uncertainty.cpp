#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/LU>

#include "proxmo/errors.hpp"
#include "proxmo/uncertainty.hpp"

#include "helpers.hpp"

using namespace proxmo;
using namespace proxmo_tests;

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

namespace {

/// Independent extreme-point enumeration for {u | Au <= b}: every feasible
/// intersection of n constraint rows whose tight-row system has full rank.
std::vector<Vector> extreme_point_oracle(const Matrix& A, const Vector& b) {
  const Index rows = A.rows(), n = A.cols();
  std::vector<Vector> points;
  std::vector<Index> pick(static_cast<size_t>(n));
  // iterate all n-subsets of rows via odometer
  for (Index i = 0; i < n; ++i) pick[static_cast<size_t>(i)] = i;
  while (true) {
    Matrix S(n, n);
    Vector rhs(n);
    for (Index i = 0; i < n; ++i) {
      S.row(i) = A.row(pick[static_cast<size_t>(i)]);
      rhs[i] = b[pick[static_cast<size_t>(i)]];
    }
    Eigen::FullPivLU<Matrix> lu(S);
    if (lu.isInvertible()) {
      const Vector u = lu.solve(rhs);
      if (((A * u - b).array() <= 1e-9).all()) {
        // extreme iff the tight rows span R^n
        std::vector<Index> tight;
        for (Index r = 0; r < rows; ++r) {
          if (std::abs(A.row(r).dot(u) - b[r]) <= 1e-8) tight.push_back(r);
        }
        Matrix T(static_cast<Index>(tight.size()), n);
        for (size_t r = 0; r < tight.size(); ++r) T.row(static_cast<Index>(r)) = A.row(tight[r]);
        if (Eigen::FullPivLU<Matrix>(T).rank() == n) {
          bool duplicate = false;
          for (const Vector& seen : points) {
            if ((seen - u).cwiseAbs().maxCoeff() <= 1e-9) {
              duplicate = true;
              break;
            }
          }
          if (!duplicate) points.push_back(u);
        }
      }
    }
    // advance the odometer
    Index j = n - 1;
    while (j >= 0 && pick[static_cast<size_t>(j)] == rows - n + j) --j;
    if (j < 0) break;
    ++pick[static_cast<size_t>(j)];
    for (Index k = j + 1; k < n; ++k) pick[static_cast<size_t>(k)] = pick[static_cast<size_t>(k - 1)] + 1;
  }
  return points;
}

bool same_point_set(std::vector<Vector> lhs, std::vector<Vector> rhs) {
  if (lhs.size() != rhs.size()) return false;
  for (const Vector& u : lhs) {
    bool found = false;
    for (const Vector& v : rhs) {
      if ((u - v).cwiseAbs().maxCoeff() <= 1e-8) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// box_vertices
// ---------------------------------------------------------------------------

TEST_CASE("box_vertices n=2 in lexicographic order") {
  const std::vector<Vector> v = box_vertices(2, 0.1);
  REQUIRE(v.size() == 4);
  CHECK(v[0][0] == 0.1);
  CHECK(v[0][1] == 0.1);
  CHECK(v[1][0] == 0.1);
  CHECK(v[1][1] == -0.1);
  CHECK(v[2][0] == -0.1);
  CHECK(v[2][1] == 0.1);
  CHECK(v[3][0] == -0.1);
  CHECK(v[3][1] == -0.1);
}

TEST_CASE("box_vertices degenerate at delta = 0") {
  const std::vector<Vector> v = box_vertices(5, 0.0);
  REQUIRE(v.size() == 1);
  CHECK(v[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("box_vertices counting at n=5") {
  const std::vector<Vector> v = box_vertices(5, 0.05);
  REQUIRE(v.size() == 32);
  for (const Vector& u : v) CHECK(u.cwiseAbs().maxCoeff() == doctest::Approx(0.05));
}

TEST_CASE("box_vertices enumeration guard") {
  CHECK_THROWS_AS(box_vertices(21, 0.1), CapacityError);
  CHECK_THROWS_AS(box_vertices(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(box_vertices(2, -0.1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// transformed_box_vertices
// ---------------------------------------------------------------------------

TEST_CASE("transformed_box_vertices identity transform") {
  const std::vector<Vector> box = box_vertices(2, 0.1);
  const std::vector<Vector> same = transformed_box_vertices(Matrix::Identity(2, 2), 0.1);
  REQUIRE(same.size() == box.size());
  for (size_t i = 0; i < box.size(); ++i) {
    CHECK((same[i] - box[i]).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("transformed_box_vertices diagonal inverse") {
  Matrix B(2, 2);
  B << 2.0, 0.0, 0.0, 1.0;
  const std::vector<Vector> v = transformed_box_vertices(B, 0.1);
  REQUIRE(v.size() == 4);
  for (const Vector& u : v) {
    CHECK(std::abs(u[0]) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(std::abs(u[1]) == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("transformed_box vertices are feasible with n tight constraints") {
  std::mt19937_64 gen(21);
  const double delta = 0.08;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix B = random_matrix(gen, 3, 3) + 3.0 * Matrix::Identity(3, 3);
    const std::vector<Vector> v = transformed_box_vertices(B, delta);
    REQUIRE(v.size() == 8);
    for (const Vector& u : v) {
      const Vector img = B * u;
      int tight = 0;
      for (Index i = 0; i < 3; ++i) {
        CHECK(std::abs(img[i]) <= delta + 1e-10);
        if (std::abs(img[i]) >= delta - 1e-9) ++tight;
      }
      CHECK(tight >= 3);
    }
  }
}

TEST_CASE("transformed_box_vertices rejects singular transforms") {
  Matrix B = Matrix::Zero(2, 2);
  B(0, 0) = 1.0;
  CHECK_THROWS_AS(transformed_box_vertices(B, 0.1), SingularMatrixError);
}

// ---------------------------------------------------------------------------
// hpolytope_vertices
// ---------------------------------------------------------------------------

TEST_CASE("hpolytope_vertices unit square") {
  Matrix A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  const Vector b = Vector::Ones(4);
  std::vector<Vector> v = hpolytope_vertices(A, b);
  REQUIRE(v.size() == 4);
  for (const Vector& u : v) {
    CHECK(std::abs(u[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(u[1]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hpolytope_vertices triangle") {
  Matrix A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  Vector b(3);
  b << 0, 0, 1;
  std::vector<Vector> expected;
  Vector p(2);
  p << 0, 0;
  expected.push_back(p);
  p << 1, 0;
  expected.push_back(p);
  p << 0, 1;
  expected.push_back(p);
  CHECK(same_point_set(hpolytope_vertices(A, b), expected));
}

TEST_CASE("hpolytope_vertices equals the independent extreme-point oracle") {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 10; ++trial) {
    // 6 box rows guarantee boundedness; 2 random rows cut corners
    Matrix A(8, 3);
    A << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1,
        0, 0, 0, 0, 0, 0;
    A.row(6) = random_vector(gen, 3).transpose();
    A.row(7) = random_vector(gen, 3).transpose();
    Vector b(8);
    b << 1, 1, 1, 1, 1, 1, 0.8, 0.8;
    CHECK(same_point_set(hpolytope_vertices(A, b), extreme_point_oracle(A, b)));
  }
}

TEST_CASE("hpolytope_vertices detects unbounded and empty sets") {
  Matrix A(2, 2);
  A << 1, 0, 0, 1;  // u <= (1,1): unbounded below
  CHECK_THROWS_AS(hpolytope_vertices(A, Vector::Ones(2)), InvalidSetError);

  Matrix A2(4, 2);
  A2 << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector b2(4);
  b2 << -1.0, 0.0, 1.0, 1.0;  // u1 <= -1 and u1 >= 0: empty
  CHECK_THROWS_AS(hpolytope_vertices(A2, b2), InvalidSetError);
}

TEST_CASE("hpolytope_vertices enumeration budget") {
  const Index rows = 60, n = 10;
  Matrix A = Matrix::Zero(rows, n);
  for (Index i = 0; i < n; ++i) {
    A(2 * i, i) = 1.0;
    A(2 * i + 1, i) = -1.0;
  }
  for (Index r = 2 * n; r < rows; ++r) A(r, 0) = 1.0;
  CHECK_THROWS_AS(hpolytope_vertices(A, Vector::Ones(rows)), CapacityError);
}

// ---------------------------------------------------------------------------
// support_function
// ---------------------------------------------------------------------------

TEST_CASE("support_function of the degenerate box is identically zero") {
  const PiecewiseAffine h = support_function(box_vertices(5, 0.0));
  REQUIRE(h.piece_count() == 1);
  std::mt19937_64 gen(23);
  CHECK(h.eval(random_vector(gen, 5)) == 0.0);
}

TEST_CASE("support_function of the 0.1-box is the scaled l1 norm") {
  const PiecewiseAffine h = support_function(box_vertices(2, 0.1));
  Vector x(2);
  x << 1.0, -2.0;
  CHECK(h.eval(x) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("transformed-box support dominates sampled feasible points") {
  std::mt19937_64 gen(24);
  const double delta = 0.05;
  Matrix B = random_matrix(gen, 3, 3) + 3.0 * Matrix::Identity(3, 3);
  const PiecewiseAffine h = support_function(transformed_box_vertices(B, delta));
  const Eigen::FullPivLU<Matrix> lu(B);
  std::uniform_real_distribution<double> unif(-delta, delta);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(gen, 3);
    const double support = h.eval(x);
    double sample_max = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
      Vector v(3);
      for (Index i = 0; i < 3; ++i) v[i] = unif(gen);
      sample_max = std::max(sample_max, lu.solve(v).dot(x));
    }
    CHECK(support >= sample_max - 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

TEST_CASE("symmetric-set support functions are nonnegative and homogeneous") {
  std::mt19937_64 gen(25);
  Matrix B = random_matrix(gen, 3, 3) + 3.0 * Matrix::Identity(3, 3);
  const PiecewiseAffine h_box = support_function(box_vertices(3, 0.1));
  const PiecewiseAffine h_tb = support_function(transformed_box_vertices(B, 0.1));
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector x = random_vector(gen, 3);
    const double t = unif(gen);
    for (const PiecewiseAffine* h : {&h_box, &h_tb}) {
      const double hx = h->eval(x);
      CHECK(hx >= 0.0);
      CHECK(h->eval(t * x) == doctest::Approx(t * hx).epsilon(1e-12));
    }
  }
}

TEST_CASE("support functions are monotone in delta") {
  std::mt19937_64 gen(26);
  const PiecewiseAffine lo = support_function(box_vertices(3, 0.05));
  const PiecewiseAffine hi = support_function(box_vertices(3, 0.1));
  for (int trial = 0; trial < 30; ++trial) {
    const Vector x = random_vector(gen, 3);
    CHECK(hi.eval(x) >= lo.eval(x) - 1e-15);
  }
}
