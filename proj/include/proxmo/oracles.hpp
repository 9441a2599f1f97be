#ifndef PROXMO_ORACLES_HPP
#define PROXMO_ORACLES_HPP

#include <string>
#include <vector>

#include "proxmo/metric.hpp"
#include "proxmo/problem.hpp"
#include "proxmo/subproblem.hpp"

namespace proxmo {

/// Result of a slow reference minimization. The value is always the value of
/// a feasible point, hence an upper bound on the true minimum.
struct OracleReport {
  double value = 0.0;
  Vector argmin;
  long evaluations = 0;
  std::string method;
};

/// Minimizes phi(d) = max_p piece_p(d) + (omega/2)||d||^2 by plain subgradient
/// descent from d = 0 with steps c/sqrt(k), c = 1/(1 + max ||lin_p||),
/// keeping the best value seen. For n <= 3 the best iterate is then polished
/// by a shrinking local grid scan with line searches along the kink valleys
/// of the max, where fixed scan patterns stall. Deliberately shares no
/// machinery with solve_direction beyond evaluating the pieces.
OracleReport subgradient_oracle(const std::vector<QuadraticPiece>& pieces,
                                const MetricSet& metrics, double omega, long iters);

/// Exhaustive grid search over [-box_radius, box_radius]^n (n <= 2,
/// resolution <= 2001 per axis), followed by the same shrinking local polish
/// around the best grid point.
OracleReport grid_oracle(const std::vector<QuadraticPiece>& pieces,
                         const MetricSet& metrics, double omega,
                         double box_radius, int resolution);

struct CertificateReport {
  bool stationary = false;
  double beta_est = 0.0;    ///< tighter (smaller) of the two upper bounds
  double beta_solver = 0.0;
  double beta_oracle = 0.0;
};

/// Pareto-stationarity check at x: beta_omega(x) with identity metrics is 0
/// exactly at stationary points, so the point passes when the estimates stay
/// above -tol. Uses solve_direction from a randomized dual start plus the
/// independent subgradient oracle.
CertificateReport stationarity_certificate(const Vector& x, const ProblemInstance& p,
                                           double omega, double tol);

}  // namespace proxmo

#endif  // PROXMO_ORACLES_HPP
