#include "proxmo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "proxmo/errors.hpp"
#include "proxmo/subproblem.hpp"

namespace proxmo {

namespace {

/// Straightforward evaluation of phi(d) = max_p piece_p(d) + (omega/2)||d||^2.
double phi_at(const std::vector<QuadraticPiece>& pieces, const MetricSet& metrics,
              double omega, const Vector& d, Index* argmax_piece = nullptr) {
  double vmax = -std::numeric_limits<double>::infinity();
  Index best = 0;
  for (size_t p = 0; p < pieces.size(); ++p) {
    const auto& piece = pieces[p];
    const double v = piece.lin.dot(d) + 0.5 * metrics.quad(piece.metric_index, d) + piece.c;
    if (v > vmax) {
      vmax = v;
      best = static_cast<Index>(p);
    }
  }
  if (argmax_piece != nullptr) *argmax_piece = best;
  return vmax + 0.5 * omega * d.squaredNorm();
}

void check_pieces(const std::vector<QuadraticPiece>& pieces, const MetricSet& metrics,
                  double omega, const char* who) {
  if (pieces.empty()) throw std::invalid_argument(std::string(who) + ": no pieces");
  if (!(omega > 0)) throw std::invalid_argument(std::string(who) + ": omega must be > 0");
  for (const auto& piece : pieces) {
    if (piece.lin.size() != pieces.front().lin.size()) {
      throw std::invalid_argument(std::string(who) + ": inconsistent piece dimensions");
    }
    if (piece.metric_index < 0 || piece.metric_index >= metrics.count()) {
      throw std::invalid_argument(std::string(who) + ": piece metric index out of range");
    }
  }
}

/// Gradient of piece p of phi at z (the piece's quadratic model plus the
/// omega regularizer).
Vector piece_gradient(const std::vector<QuadraticPiece>& pieces, const MetricSet& metrics,
                      double omega, const Vector& z, size_t p) {
  const auto& piece = pieces[p];
  return piece.lin + metrics.matrix(piece.metric_index) * z + omega * z;
}

/// Golden-section minimization of phi along z + t u for t in [0, tmax]. Every
/// line restriction of phi is convex, hence unimodal on the bracket. Updates
/// the incumbent on improvement and reports whether it improved.
bool ray_min(const std::vector<QuadraticPiece>& pieces, const MetricSet& metrics,
             double omega, const Vector& z, const Vector& u, double tmax,
             Vector& best_d, double& best, long& evaluations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = tmax;
  double t1 = hi - inv_phi * (hi - lo);
  double t2 = lo + inv_phi * (hi - lo);
  double f1 = phi_at(pieces, metrics, omega, z + t1 * u);
  double f2 = phi_at(pieces, metrics, omega, z + t2 * u);
  evaluations += 2;
  for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + tmax); ++it) {
    if (f1 <= f2) {
      hi = t2;
      t2 = t1;
      f2 = f1;
      t1 = hi - inv_phi * (hi - lo);
      f1 = phi_at(pieces, metrics, omega, z + t1 * u);
    } else {
      lo = t1;
      t1 = t2;
      f1 = f2;
      t2 = lo + inv_phi * (hi - lo);
      f2 = phi_at(pieces, metrics, omega, z + t2 * u);
    }
    ++evaluations;
  }
  const double t = f1 <= f2 ? t1 : t2;
  const double value = std::min(f1, f2);
  if (value < best) {
    best = value;
    best_d = z + t * u;
    return true;
  }
  return false;
}

/// Descent attempt along the kinks of the max: line-minimizes phi along the
/// negated gradients of the top pieces and along the minimal-norm convex
/// combination of each top pair. At a two-piece kink the pair direction is
/// the tangent of the valley, which axis-aligned scans cannot follow.
bool kink_descent(const std::vector<QuadraticPiece>& pieces, const MetricSet& metrics,
                  double omega, double radius, Vector& best_d, double& best,
                  long& evaluations) {
  const Vector z = best_d;
  std::vector<std::pair<double, size_t>> ranked;
  for (size_t p = 0; p < pieces.size(); ++p) {
    const auto& piece = pieces[p];
    const double v = piece.lin.dot(z) + 0.5 * metrics.quad(piece.metric_index, z) + piece.c;
    ranked.emplace_back(v, p);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const size_t top = std::min<size_t>(3, ranked.size());

  std::vector<Vector> candidates;
  std::vector<Vector> grads;
  for (size_t i = 0; i < top; ++i) {
    grads.push_back(piece_gradient(pieces, metrics, omega, z, ranked[i].second));
    candidates.push_back(-grads.back());
  }
  for (size_t i = 0; i < top; ++i) {
    for (size_t j = i + 1; j < top; ++j) {
      const Vector diff = grads[i] - grads[j];
      const double denom = diff.squaredNorm();
      if (denom <= 0.0) continue;
      const double mu = std::clamp(grads[j].dot(-diff) / denom, 0.0, 1.0);
      candidates.push_back(-(mu * grads[i] + (1.0 - mu) * grads[j]));
    }
  }

  bool improved = false;
  for (const Vector& dir : candidates) {
    const double norm = dir.norm();
    if (norm <= 1e-15) continue;
    improved = ray_min(pieces, metrics, omega, best_d, dir / norm, 4.0 * radius, best_d,
                       best, evaluations) ||
               improved;
  }
  return improved;
}

/// Shrinking local grid scan around the incumbent. Each sweep evaluates a
/// dense 9-per-axis grid over the current box; an interior improvement
/// re-centers and halves the box, a boundary improvement re-centers at the
/// same scale (the minimizer may lie outside). When the grid finds nothing,
/// kink_descent hunts along the valleys of the max, whose tangents a fixed
/// axis-aligned pattern misses; only after both fail does the box halve.
/// phi is convex, so the value converges with the box.
void zoom_polish(const std::vector<QuadraticPiece>& pieces, const MetricSet& metrics,
                 double omega, double radius, Vector& best_d, double& best,
                 long& evaluations) {
  const Index n = best_d.size();
  const int pts = 9;
  Vector center = best_d;
  int shrinks = 0;
  for (int sweep = 0; sweep < 500 && shrinks < 70; ++sweep) {
    double sweep_best = best;
    Vector sweep_d = best_d;
    bool on_boundary = false;
    std::vector<int> odo(static_cast<size_t>(n), 0);
    Vector trial(n);
    while (true) {
      bool edge = false;
      for (Index j = 0; j < n; ++j) {
        const int i = odo[static_cast<size_t>(j)];
        trial[j] = center[j] + radius * (2.0 * i / (pts - 1) - 1.0);
        edge = edge || i == 0 || i == pts - 1;
      }
      const double value = phi_at(pieces, metrics, omega, trial);
      ++evaluations;
      if (value < sweep_best) {
        sweep_best = value;
        sweep_d = trial;
        on_boundary = edge;
      }
      Index j = 0;
      while (j < n && ++odo[static_cast<size_t>(j)] == pts) {
        odo[static_cast<size_t>(j)] = 0;
        ++j;
      }
      if (j == n) break;
    }
    if (sweep_best < best) {
      best = sweep_best;
      best_d = sweep_d;
      center = sweep_d;
      if (!on_boundary) {
        radius *= 0.5;
        ++shrinks;
      }
    } else if (kink_descent(pieces, metrics, omega, radius, best_d, best, evaluations)) {
      center = best_d;
    } else {
      radius *= 0.5;
      ++shrinks;
    }
  }
}

}  // namespace

OracleReport subgradient_oracle(const std::vector<QuadraticPiece>& pieces,
                                const MetricSet& metrics, double omega, long iters) {
  check_pieces(pieces, metrics, omega, "subgradient_oracle");
  if (iters < 1) throw std::invalid_argument("subgradient_oracle: iters must be >= 1");
  const Index n = pieces.front().lin.size();

  double max_lin = 0.0;
  for (const auto& piece : pieces) max_lin = std::max(max_lin, piece.lin.norm());
  const double c = 1.0 / (1.0 + max_lin);

  OracleReport report;
  report.method = "subgradient";
  Vector d = Vector::Zero(n);
  report.value = phi_at(pieces, metrics, omega, d);
  report.argmin = d;
  report.evaluations = 1;

  for (long k = 1; k <= iters; ++k) {
    Index top = 0;
    phi_at(pieces, metrics, omega, d, &top);
    const auto& piece = pieces[static_cast<size_t>(top)];
    Vector sub = piece.lin + omega * d;
    if (!metrics.is_zero()) sub.noalias() += metrics.matrix(piece.metric_index) * d;
    d -= (c / std::sqrt(static_cast<double>(k))) * sub;
    const double value = phi_at(pieces, metrics, omega, d);
    report.evaluations += 2;
    if (value < report.value) {
      report.value = value;
      report.argmin = d;
    }
  }
  if (n <= 3) {
    zoom_polish(pieces, metrics, omega, 0.5 * (1.0 + report.argmin.norm()),
                report.argmin, report.value, report.evaluations);
  }
  return report;
}

OracleReport grid_oracle(const std::vector<QuadraticPiece>& pieces,
                         const MetricSet& metrics, double omega, double box_radius,
                         int resolution) {
  check_pieces(pieces, metrics, omega, "grid_oracle");
  const Index n = pieces.front().lin.size();
  if (n > 2) throw CapacityError("grid_oracle: only n <= 2 is supported");
  if (resolution < 2 || resolution > 2001) {
    throw CapacityError("grid_oracle: resolution must be in [2, 2001]");
  }
  if (!(box_radius > 0)) {
    throw std::invalid_argument("grid_oracle: box_radius must be > 0");
  }

  OracleReport report;
  report.method = "grid";
  const double spacing = 2.0 * box_radius / static_cast<double>(resolution - 1);

  Vector d(n), best_d(n);
  double best = std::numeric_limits<double>::infinity();
  if (n == 1) {
    for (int i = 0; i < resolution; ++i) {
      d[0] = -box_radius + spacing * i;
      const double value = phi_at(pieces, metrics, omega, d);
      ++report.evaluations;
      if (value < best) {
        best = value;
        best_d = d;
      }
    }
  } else {
    for (int i = 0; i < resolution; ++i) {
      d[0] = -box_radius + spacing * i;
      for (int j = 0; j < resolution; ++j) {
        d[1] = -box_radius + spacing * j;
        const double value = phi_at(pieces, metrics, omega, d);
        ++report.evaluations;
        if (value < best) {
          best = value;
          best_d = d;
        }
      }
    }
  }

  zoom_polish(pieces, metrics, omega, 2.0 * spacing, best_d, best, report.evaluations);

  report.value = best;
  report.argmin = best_d;
  return report;
}

CertificateReport stationarity_certificate(const Vector& x, const ProblemInstance& p,
                                           double omega, double tol) {
  if (!(tol >= 0)) throw std::invalid_argument("stationarity_certificate: tol must be >= 0");
  const MetricSet metrics = MetricSet::identity(p.objectives(), p.dim());
  const std::vector<QuadraticPiece> pieces = build_pieces(x, p, metrics);
  const Index P = static_cast<Index>(pieces.size());

  // Fresh random dual start: exponential draws normalized onto the simplex,
  // from a fixed seed so the certificate is reproducible.
  std::mt19937_64 gen(0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(P));
  std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
  Vector init(P);
  for (Index q = 0; q < P; ++q) init[q] = -std::log(unif(gen));
  init /= init.sum();

  SubproblemOptions opts;
  opts.initial_weights = &init;
  double beta_solver;
  try {
    beta_solver = solve_direction(x, p, metrics, omega, 1e-12, opts).beta;
  } catch (const SubproblemError& err) {
    // Budget exhausted: the best primal iterate still evaluates to a valid
    // upper bound on beta.
    beta_solver = theta_at(x, err.best_d, p, metrics) + 0.5 * omega * err.best_d.squaredNorm();
  }

  const OracleReport oracle = subgradient_oracle(pieces, metrics, omega, 20000);

  CertificateReport report;
  report.beta_solver = beta_solver;
  report.beta_oracle = oracle.value;
  report.beta_est = std::min(beta_solver, oracle.value);
  report.stationary = std::max(beta_solver, oracle.value) >= -tol;
  return report;
}

}  // namespace proxmo
