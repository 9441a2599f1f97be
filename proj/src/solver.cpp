#include "proxmo/solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "proxmo/errors.hpp"

namespace proxmo {

namespace {

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) {
    throw std::invalid_argument("SolverConfig: tau must lie in (0, 1)");
  }
  if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0)) {
    throw std::invalid_argument("SolverConfig: zeta must lie in (0, 1)");
  }
  if (!(cfg.omega > 0.0)) throw std::invalid_argument("SolverConfig: omega must be > 0");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("SolverConfig: eps must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (cfg.max_backtracks < 0) {
    throw std::invalid_argument("SolverConfig: max_backtracks must be >= 0");
  }
  if (!(cfg.b0_scale > 0.0)) {
    throw std::invalid_argument("SolverConfig: b0_scale must be > 0");
  }
  if (!(cfg.sub_tol_cap > 0.0) || !(cfg.sub_tol_scale > 0.0)) {
    throw std::invalid_argument("SolverConfig: subproblem tolerances must be > 0");
  }
  if (cfg.sub_max_iter < 1) {
    throw std::invalid_argument("SolverConfig: sub_max_iter must be >= 1");
  }
}

/// Huang's third-order correction estimated from function and gradient values
/// is identically zero on quadratics, but the formula evaluates as a small
/// difference of large terms; below this floor the quotient theta/(s'y) is
/// pure roundoff and is treated as zero.
double clamp_theta_noise(double theta, double g_k, double g_k1, const Vector& grad_k,
                         const Vector& grad_k1, const Vector& s) {
  const double magnitude = 6.0 * (std::abs(g_k) + std::abs(g_k1)) +
                           3.0 * (grad_k.norm() + grad_k1.norm()) * s.norm();
  return (std::abs(theta) < 1e-12 * magnitude) ? 0.0 : theta;
}

}  // namespace

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Stationary: return "stationary";
    case RunStatus::MaxIter: return "max_iter";
    case RunStatus::LineSearchFailure: return "line_search_failure";
    case RunStatus::SubproblemFailure: return "subproblem_failure";
  }
  return "unknown";
}

ArmijoResult armijo_search(const Vector& x, const Vector& d, double theta,
                           const ProblemInstance& p, double tau, double zeta,
                           int max_backtracks) {
  if (!(theta < 0.0)) {
    throw std::invalid_argument("armijo_search: theta must be negative");
  }
  if (d.norm() == 0.0) throw std::invalid_argument("armijo_search: d must be nonzero");
  if (!(tau > 0.0 && tau < 1.0) || !(zeta > 0.0 && zeta < 1.0)) {
    throw std::invalid_argument("armijo_search: tau, zeta must lie in (0, 1)");
  }

  const Vector F0 = eval_F(p, x);
  double step = 1.0;
  ArmijoResult result;
  for (int j = 0; j <= max_backtracks; ++j) {
    const Vector F_trial = eval_F(p, x + step * d);
    bool ok = true;
    for (Index i = 0; i < F0.size(); ++i) {
      if (!(F_trial[i] <= F0[i] + step * tau * theta)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      result.accepted = true;
      result.step = step;
      result.backtracks = j;
      return result;
    }
    if (j < max_backtracks) step *= zeta;
  }
  result.accepted = false;
  result.step = step;  // last rejected trial
  result.backtracks = max_backtracks;
  return result;
}

RunResult run(const ProblemInstance& p, const Vector& x0, const SolverConfig& cfg) {
  const MetricSet metrics =
      (cfg.method == UpdateKind::FROZEN_ZERO)
          ? MetricSet::frozen_zero(p.objectives(), p.dim())
          : MetricSet::identity(p.objectives(), p.dim(), cfg.b0_scale);
  return run(p, x0, cfg, metrics);
}

RunResult run(const ProblemInstance& p, const Vector& x0, const SolverConfig& cfg,
              MetricSet metrics) {
  validate_config(cfg);
  if (x0.size() != p.dim()) throw std::invalid_argument("run: x0 dimension mismatch");
  if (!x0.allFinite()) throw std::invalid_argument("run: x0 must be finite");
  if (metrics.count() != p.objectives() || metrics.dim() != p.dim()) {
    throw std::invalid_argument("run: metrics shape mismatch");
  }
  if (metrics.is_zero() != (cfg.method == UpdateKind::FROZEN_ZERO)) {
    throw std::invalid_argument("run: metrics mode does not match cfg.method");
  }

  const Index m = p.objectives();
  RunResult result;
  result.trace.reserve(64);

  double omega = cfg.omega;
  if (cfg.auto_omega) {
    omega = 1.01 * lipschitz_bound(p) / 2.0;
    std::ostringstream note;
    note << "auto_omega: using omega = " << omega;
    result.warnings.push_back(note.str());
  }
  if (!cfg.line_search) {
    const double L = lipschitz_bound(p);
    if (omega <= L / 2.0) {
      std::ostringstream note;
      note << "fixed-step mode with omega = " << omega << " <= L/2 = " << (L / 2.0)
           << ": the descent guarantee does not apply";
      result.warnings.push_back(note.str());
    }
  }

  Vector x = x0;
  double prev_dnorm_sq = 1.0;
  result.status = RunStatus::MaxIter;

  while (static_cast<int>(result.trace.size()) < cfg.max_iter) {
    if (!x.allFinite()) {
      result.status = RunStatus::SubproblemFailure;
      result.warnings.push_back("iterate became non-finite; aborting");
      break;
    }

    const double tol =
        std::min(cfg.sub_tol_cap,
                 cfg.sub_tol_scale * omega * std::max(prev_dnorm_sq, 1e-8));
    SubproblemOptions opts;
    opts.max_iter = cfg.sub_max_iter;
    SubproblemSolution sol;
    try {
      sol = solve_direction(x, p, metrics, omega, tol, opts);
    } catch (const SubproblemError& err) {
      result.status = RunStatus::SubproblemFailure;
      result.warnings.push_back(std::string("direction solve failed: ") + err.what());
      result.final_dnorm = err.best_d.allFinite() ? err.best_d.norm() : 0.0;
      result.final_beta = err.gap;
      break;
    }

    const double dnorm = sol.d.norm();
    result.final_dnorm = dnorm;
    result.final_beta = sol.beta;

    if (dnorm < cfg.eps) {
      result.status = RunStatus::Stationary;
      break;
    }

    double step = 1.0;
    int backtracks = 0;
    if (cfg.line_search) {
      const ArmijoResult ls =
          armijo_search(x, sol.d, sol.theta, p, cfg.tau, cfg.zeta, cfg.max_backtracks);
      if (!ls.accepted) {
        result.status = RunStatus::LineSearchFailure;
        std::ostringstream note;
        note << "line search exhausted " << cfg.max_backtracks
             << " backtracks (last step " << ls.step << ")";
        result.warnings.push_back(note.str());
        break;
      }
      step = ls.step;
      backtracks = ls.backtracks;
    }

    result.trace.push_back(TraceRow{dnorm, sol.beta, sol.theta, step, backtracks,
                                    sol.gap, sol.iterations, eval_F(p, x)});

    const Vector s = step * sol.d;
    const Vector x_next = x + s;

    if (cfg.method != UpdateKind::FROZEN_ZERO && x_next.allFinite()) {
      for (Index i = 0; i < m; ++i) {
        const Vector grad_k = p.smooth(i).grad(x);
        const Vector grad_k1 = p.smooth(i).grad(x_next);
        const Vector y = grad_k1 - grad_k;
        if (!curvature_guard(s, y, metrics.matrix(i))) continue;
        switch (cfg.method) {
          case UpdateKind::BFGS:
            metrics.set(i, bfgs_update(metrics.matrix(i), s, y));
            break;
          case UpdateKind::SSBFGS:
            metrics.set(i, ss_bfgs_update(metrics.matrix(i), s, y));
            break;
          case UpdateKind::HBFGS: {
            const double g_k = p.smooth(i).eval(x);
            const double g_k1 = p.smooth(i).eval(x_next);
            const double theta_raw = huang_theta(g_k, g_k1, grad_k, grad_k1, s);
            const double theta = clamp_theta_noise(theta_raw, g_k, g_k1, grad_k, grad_k1, s);
            // The modified secant vector must keep positive curvature.
            if (1.0 + theta / s.dot(y) <= 1e-8) continue;
            metrics.set(i, h_bfgs_update(metrics.matrix(i), s, y, theta));
            break;
          }
          case UpdateKind::FROZEN_ZERO:
            break;
        }
      }
    }

    x = x_next;
    prev_dnorm_sq = dnorm * dnorm;
  }

  result.x_final = x;
  result.F_final = eval_F(p, x);
  result.iterations = static_cast<int>(result.trace.size());
  return result;
}

RunResult pgm_baseline(const ProblemInstance& p, const Vector& x0, SolverConfig cfg) {
  cfg.method = UpdateKind::FROZEN_ZERO;
  return run(p, x0, cfg);
}

}  // namespace proxmo
