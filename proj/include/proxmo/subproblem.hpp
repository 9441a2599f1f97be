#ifndef PROXMO_SUBPROBLEM_HPP
#define PROXMO_SUBPROBLEM_HPP

#include <utility>
#include <vector>

#include "proxmo/metric.hpp"
#include "proxmo/problem.hpp"

namespace proxmo {

/// One flattened piece of the direction model at a fixed point x:
/// piece(d) = lin·d + 1/2 d'B_i d + c, where i = metric_index,
/// lin = grad g_i(x) + a_j and c = a_j·x + b_j - h_i(x) <= 0.
struct QuadraticPiece {
  Vector lin;
  double c = 0.0;
  Index metric_index = 0;
};

/// Result of the direction subproblem
///   min_d  theta_x(d) + (omega/2)||d||^2
/// where theta_x(d) = max_i {grad g_i(x)·d + 1/2 d'B_i d + h_i(x+d) - h_i(x)}.
struct SubproblemSolution {
  Vector d;        ///< the proximal quasi-Newton direction
  double beta;     ///< theta + (omega/2)||d||^2, the subproblem optimum (<= 0)
  double theta;    ///< theta_x(d), evaluated directly
  double gap;      ///< certified primal-dual gap; ||d - d*||^2 <= 2 gap / omega
  Vector weights;  ///< dual simplex weights over the pieces
  int iterations;  ///< dual evaluations spent
};

struct SubproblemOptions {
  int max_iter = 100000;
  /// Optional starting simplex weights (defaults to uniform over the pieces
  /// active at d = 0, i.e. those with c >= -1e-12).
  const Vector* initial_weights = nullptr;
};

/// Flattens the direction model into per-(objective, affine-piece) quadratic
/// pieces whose pointwise max over p equals theta_x(d) for every d.
std::vector<QuadraticPiece> build_pieces(const Vector& x, const ProblemInstance& p,
                                         const MetricSet& metrics);

/// theta_x(d) evaluated directly from the problem parts (not via pieces).
double theta_at(const Vector& x, const Vector& d, const ProblemInstance& p,
                const MetricSet& metrics);

/// Solves the direction subproblem by maximizing the concave dual
///   psi(lambda) = sum_p lambda_p c_p - 1/2 g(lambda)' H(lambda)^{-1} g(lambda),
///   H(lambda) = sum_p lambda_p B_{i(p)} + omega I,  g(lambda) = sum_p lambda_p lin_p,
/// over the simplex until the primal-dual gap is at most tol.
/// Throws SubproblemError (with best iterate and gap) if the budget runs out.
SubproblemSolution solve_direction(const Vector& x, const ProblemInstance& p,
                                   const MetricSet& metrics, double omega,
                                   double tol = 1e-12,
                                   const SubproblemOptions& opts = {});

/// Dual value psi(lambda) and the inner minimizer d(lambda) = -H(lambda)^{-1} g(lambda).
std::pair<double, Vector> dual_value(const Vector& lambda,
                                     const std::vector<QuadraticPiece>& pieces,
                                     const MetricSet& metrics, double omega);

}  // namespace proxmo

#endif  // PROXMO_SUBPROBLEM_HPP
