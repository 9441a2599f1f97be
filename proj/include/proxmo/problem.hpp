#ifndef PROXMO_PROBLEM_HPP
#define PROXMO_PROBLEM_HPP

#include <vector>

#include <Eigen/Core>

namespace proxmo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// One affine piece a·x + b of a piecewise-affine function.
struct AffinePiece {
  Vector a;
  double b = 0.0;
};

/// Finite max of affine pieces: value(x) = max_j (a_j·x + b_j).
/// Proper, convex, and real-valued by construction; always has at least one piece.
class PiecewiseAffine {
 public:
  explicit PiecewiseAffine(std::vector<AffinePiece> pieces);

  /// The identically-zero function (single piece a = 0, b = 0).
  static PiecewiseAffine zero(Index n);

  Index dim() const { return pieces_.front().a.size(); }
  Index piece_count() const { return static_cast<Index>(pieces_.size()); }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }

  /// max_j (a_j·x + b_j)
  double eval(const Vector& x) const;

  /// Index of a maximizing piece at x (lowest index wins ties).
  Index argmax(const Vector& x) const;

 private:
  std::vector<AffinePiece> pieces_;
};

/// Smooth part g(x) = 1/2 x'Qx + q'x with Q symmetric positive definite,
/// hence strongly convex with modulus equal to the smallest eigenvalue of Q.
class QuadraticObjective {
 public:
  /// Symmetrizes Q as (Q+Q')/2; remembers whether the asymmetry exceeded
  /// 1e-12 relative so callers can surface a warning. Rejects non-PD Q.
  QuadraticObjective(Matrix Q, Vector q);

  Index dim() const { return q_.size(); }
  const Matrix& Q() const { return Q_; }
  const Vector& q() const { return q_; }
  bool was_symmetrized() const { return symmetrized_; }

  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;

 private:
  Matrix Q_;
  Vector q_;
  bool symmetrized_ = false;
};

/// A composite multiobjective instance: F_i(x) = g_i(x) + h_i(x), i = 1..m,
/// with every part sharing dimension n.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<QuadraticObjective> smooth,
                  std::vector<PiecewiseAffine> nonsmooth);

  Index dim() const { return smooth_.front().dim(); }
  Index objectives() const { return static_cast<Index>(smooth_.size()); }
  const QuadraticObjective& smooth(Index i) const { return smooth_.at(static_cast<size_t>(i)); }
  const PiecewiseAffine& nonsmooth(Index i) const { return nonsmooth_.at(static_cast<size_t>(i)); }

 private:
  std::vector<QuadraticObjective> smooth_;
  std::vector<PiecewiseAffine> nonsmooth_;
};

double eval_smooth(const QuadraticObjective& obj, const Vector& x);
Vector grad_smooth(const QuadraticObjective& obj, const Vector& x);
double eval_nonsmooth(const PiecewiseAffine& h, const Vector& x);

/// All objective values F_i(x) = g_i(x) + h_i(x) as an m-vector.
Vector eval_F(const ProblemInstance& p, const Vector& x);

}  // namespace proxmo

#endif  // PROXMO_PROBLEM_HPP
