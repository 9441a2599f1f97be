#ifndef PROXMO_SOLVER_HPP
#define PROXMO_SOLVER_HPP

#include <string>
#include <vector>

#include "proxmo/metric.hpp"
#include "proxmo/problem.hpp"
#include "proxmo/subproblem.hpp"

namespace proxmo {

enum class RunStatus { Stationary, MaxIter, LineSearchFailure, SubproblemFailure };

std::string to_string(RunStatus status);

struct SolverConfig {
  UpdateKind method = UpdateKind::BFGS;
  bool line_search = true;
  double omega = 5.0;
  double tau = 0.5;
  double zeta = 0.5;
  double eps = 1e-6;     ///< stop when ||d^k|| < eps
  int max_iter = 10000;
  int max_backtracks = 60;
  double b0_scale = 1.0; ///< initial metrics B_i = b0_scale * I
  bool auto_omega = false; ///< replace omega by 1.01 * L / 2 at run start
  /// Direction-solve tolerance policy:
  ///   tol_k = min(sub_tol_cap, sub_tol_scale * omega * max(||d^{k-1}||^2, 1e-8))
  double sub_tol_cap = 1e-12;
  double sub_tol_scale = 1e-4;
  int sub_max_iter = 100000;
};

/// One completed outer iteration. F holds the objective values at the point
/// the iteration started from.
struct TraceRow {
  double dnorm;
  double beta;
  double theta;
  double step;       ///< accepted step length (1.0 in fixed-step mode)
  int backtracks;
  double gap;        ///< subproblem duality gap
  int sub_iterations;
  Vector F;
};

struct RunResult {
  Vector x_final;
  Vector F_final;
  RunStatus status = RunStatus::MaxIter;
  int iterations = 0;          ///< completed iterations (= trace.size())
  std::vector<TraceRow> trace;
  double final_dnorm = 0.0;    ///< ||d|| of the last direction solve
  double final_beta = 0.0;     ///< beta of the last direction solve
  std::vector<std::string> warnings;
};

struct ArmijoResult {
  bool accepted = false;
  double step = 0.0;     ///< accepted step, or the last rejected one on failure
  int backtracks = 0;
};

/// Backtracking rule: the largest step zeta^j, j = 0, 1, 2, ..., with
/// F_i(x + step d) <= F_i(x) + step * tau * theta for every i, taking the
/// first success. Requires theta < 0 and d != 0.
ArmijoResult armijo_search(const Vector& x, const Vector& d, double theta,
                           const ProblemInstance& p, double tau, double zeta,
                           int max_backtracks);

/// The main iteration: solve the direction subproblem, stop when ||d|| < eps,
/// otherwise step (with or without line search) and update the metrics per
/// cfg.method. Starts from B_i = b0_scale * I (or zero metrics for
/// FROZEN_ZERO).
RunResult run(const ProblemInstance& p, const Vector& x0, const SolverConfig& cfg);

/// run() with an explicit starting MetricSet (must match cfg.method's mode).
RunResult run(const ProblemInstance& p, const Vector& x0, const SolverConfig& cfg,
              MetricSet metrics);

/// The proximal-gradient baseline: run() with method forced to FROZEN_ZERO.
RunResult pgm_baseline(const ProblemInstance& p, const Vector& x0, SolverConfig cfg);

}  // namespace proxmo

#endif  // PROXMO_SOLVER_HPP
