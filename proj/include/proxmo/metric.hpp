#ifndef PROXMO_METRIC_HPP
#define PROXMO_METRIC_HPP

#include <string>
#include <vector>

#include "proxmo/problem.hpp"

namespace proxmo {

/// Which quasi-Newton update drives the per-objective metrics.
/// FROZEN_ZERO designates the proximal-gradient baseline: B_i is identically
/// zero inside the direction subproblem and is never updated.
enum class UpdateKind { BFGS, SSBFGS, HBFGS, FROZEN_ZERO };

std::string to_string(UpdateKind kind);
UpdateKind parse_update_kind(const std::string& name);

/// The per-objective metric matrices B_1..B_m.
///
/// In the default mode every matrix is symmetric positive definite. The
/// frozen-zero mode represents B_i ≡ 0 for the proximal-gradient baseline:
/// quadratic terms evaluate to zero and the set refuses mutation.
class MetricSet {
 public:
  /// scale * I for every objective (scale > 0).
  static MetricSet identity(Index m, Index n, double scale = 1.0);
  /// The B ≡ 0 baseline mode.
  static MetricSet frozen_zero(Index m, Index n);
  /// Explicit matrices; each is validated as symmetric (1e-10 relative) SPD.
  static MetricSet from_matrices(std::vector<Matrix> mats);

  bool is_zero() const { return zero_; }
  Index count() const { return static_cast<Index>(mats_.size()); }
  Index dim() const { return dim_; }

  /// B_i (the zero matrix in frozen-zero mode).
  const Matrix& matrix(Index i) const { return mats_.at(static_cast<size_t>(i)); }

  /// d'B_i d; exactly 0 in frozen-zero mode.
  double quad(Index i, const Vector& d) const;

  /// H += w * B_i; no-op in frozen-zero mode.
  void accumulate(Matrix& H, Index i, double w) const;

  /// Replace B_i; throws in frozen-zero mode.
  void set(Index i, Matrix B);

 private:
  MetricSet() = default;
  std::vector<Matrix> mats_;
  Index dim_ = 0;
  bool zero_ = false;
};

/// B - (Bs s'B)/(s'Bs) + (y y')/(s'y). Requires a passing curvature_guard.
Matrix bfgs_update(const Matrix& B, const Vector& s, const Vector& y);

/// (s'y/s'Bs)(B - Bs s'B/(s'Bs)) + y y'/(s'y): the self-scaling variant.
Matrix ss_bfgs_update(const Matrix& B, const Vector& s, const Vector& y);

/// 6(g_k - g_k1) + 3(grad_k + grad_k1)'s. Vanishes identically when g is
/// quadratic (the cubic Taylor correction it estimates is zero).
double huang_theta(double g_k, double g_k1, const Vector& grad_k,
                   const Vector& grad_k1, const Vector& s);

/// BFGS update against yhat = (1 + theta/(s'y)) y instead of y.
Matrix h_bfgs_update(const Matrix& B, const Vector& s, const Vector& y, double theta);

/// True iff ||s|| > 1e-14, s'y > 1e-12 ||s|| ||y||, and s'Bs > 1e-14.
/// Callers skip the metric update (keeping B) when this fails.
bool curvature_guard(const Vector& s, const Vector& y, const Matrix& B);

/// max_i lambda_max(Q_i): the exact common Lipschitz constant of the
/// gradients of the quadratic smooth parts.
double lipschitz_bound(const ProblemInstance& p);

}  // namespace proxmo

#endif  // PROXMO_METRIC_HPP
