#include "proxmo/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "proxmo/errors.hpp"

namespace proxmo {

namespace {

/// Euclidean projection onto the probability simplex (sort-based).
Vector project_simplex(const Vector& u) {
  const Index P = u.size();
  std::vector<double> sorted(u.data(), u.data() + P);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  Index rho = 0;
  for (Index j = 0; j < P; ++j) {
    cumsum += sorted[static_cast<size_t>(j)];
    const double t = (1.0 - cumsum) / static_cast<double>(j + 1);
    if (sorted[static_cast<size_t>(j)] + t > 0.0) {
      rho = j + 1;
      tau = t;
    }
  }
  if (rho == 0) {  // all mass collapsed; fall back to uniform
    return Vector::Constant(P, 1.0 / static_cast<double>(P));
  }
  return (u.array() + tau).cwiseMax(0.0);
}

/// Shared evaluation state for one solve: pieces flattened into a matrix.
struct DualWorkspace {
  const MetricSet* metrics = nullptr;
  double omega = 0.0;
  Index n = 0;
  Index m = 0;
  Index P = 0;
  Matrix lins;                 // n x P
  Vector c;                    // P
  std::vector<Index> owner;    // P, metric index per piece

  struct Eval {
    Vector d;        // d(lambda)
    Vector v;        // piece values at d
    double psi;      // dual value
    double phi;      // primal value at d
    double gap;      // phi - psi = vmax - lambda.v
    double vmax;
  };

  Eval evaluate(const Vector& lambda) const {
    Eval e;
    Matrix H = Matrix::Identity(n, n) * omega;
    if (!metrics->is_zero()) {
      Vector w = Vector::Zero(m);
      for (Index p = 0; p < P; ++p) w[owner[static_cast<size_t>(p)]] += lambda[p];
      for (Index i = 0; i < m; ++i) {
        if (w[i] != 0.0) metrics->accumulate(H, i, w[i]);
      }
    }
    const Vector g = lins * lambda;
    e.d = Eigen::LLT<Matrix>(H).solve(-g);
    piece_values(e.d, e.v);
    e.vmax = e.v.maxCoeff();
    const double reg = 0.5 * omega * e.d.squaredNorm();
    e.psi = lambda.dot(e.v) + reg;
    e.phi = e.vmax + reg;
    e.gap = std::max(0.0, e.phi - e.psi);
    return e;
  }

  void piece_values(const Vector& d, Vector& v) const {
    v = lins.transpose() * d + c;
    if (!metrics->is_zero()) {
      Vector quad(m);
      for (Index i = 0; i < m; ++i) quad[i] = 0.5 * metrics->quad(i, d);
      for (Index p = 0; p < P; ++p) v[p] += quad[owner[static_cast<size_t>(p)]];
    }
  }
};

/// Solves the equality-constrained optimality system on a fixed active set by
/// damped Newton: H(lambda)d + g(lambda) = 0, v_p(d) = theta on the set,
/// sum lambda = 1. Returns true with the active weights on success.
bool newton_on_active_set(const DualWorkspace& ws, const std::vector<Index>& active,
                          Vector& d, Vector& lam_active, double& theta) {
  const Index n = ws.n;
  const Index A = static_cast<Index>(active.size());
  const Index dim = n + A + 1;
  Matrix J(dim, dim);
  Vector G(dim), z(dim);

  auto residual = [&](const Vector& dd, const Vector& la, double th, Vector& out) {
    Matrix H = Matrix::Identity(n, n) * ws.omega;
    Vector g = Vector::Zero(n);
    for (Index a = 0; a < A; ++a) {
      const Index p = active[static_cast<size_t>(a)];
      ws.metrics->accumulate(H, ws.owner[static_cast<size_t>(p)], la[a]);
      g.noalias() += la[a] * ws.lins.col(p);
    }
    out.segment(0, n) = H * dd + g;
    for (Index a = 0; a < A; ++a) {
      const Index p = active[static_cast<size_t>(a)];
      const double quad = 0.5 * ws.metrics->quad(ws.owner[static_cast<size_t>(p)], dd);
      out[n + a] = ws.lins.col(p).dot(dd) + quad + ws.c[p] - th;
    }
    out[dim - 1] = la.sum() - 1.0;
  };

  residual(d, lam_active, theta, G);
  double res_norm = G.cwiseAbs().maxCoeff();
  const double res_scale =
      1.0 + std::abs(theta) + ws.omega * d.squaredNorm() + ws.c.cwiseAbs().maxCoeff();

  for (int it = 0; it < 40; ++it) {
    if (res_norm <= 1e-13 * res_scale) return true;
    // Jacobian at (d, lam_active, theta)
    Matrix H = Matrix::Identity(n, n) * ws.omega;
    for (Index a = 0; a < A; ++a) {
      const Index p = active[static_cast<size_t>(a)];
      ws.metrics->accumulate(H, ws.owner[static_cast<size_t>(p)], lam_active[a]);
    }
    J.setZero();
    J.block(0, 0, n, n) = H;
    for (Index a = 0; a < A; ++a) {
      const Index p = active[static_cast<size_t>(a)];
      Vector r = ws.lins.col(p);
      if (!ws.metrics->is_zero()) {
        r.noalias() += ws.metrics->matrix(ws.owner[static_cast<size_t>(p)]) * d;
      }
      J.block(0, n + a, n, 1) = r;
      J.block(n + a, 0, 1, n) = r.transpose();
      J(n + a, dim - 1) = -1.0;
      J(dim - 1, n + a) = 1.0;
    }
    Eigen::PartialPivLU<Matrix> lu(J);
    const Vector step = lu.solve(-G);
    if (!step.allFinite()) return false;

    double t = 1.0;
    bool improved = false;
    Vector G_try(dim);
    for (int back = 0; back < 25; ++back) {
      const Vector d_try = d + t * step.segment(0, n);
      const Vector la_try = lam_active + t * step.segment(n, A);
      const double th_try = theta + t * step[dim - 1];
      residual(d_try, la_try, th_try, G_try);
      const double try_norm = G_try.cwiseAbs().maxCoeff();
      if (try_norm < res_norm * (1.0 - 0.25 * t) || try_norm <= 1e-13 * res_scale) {
        d = d_try;
        lam_active = la_try;
        theta = th_try;
        G = G_try;
        res_norm = try_norm;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) return false;
  }
  return res_norm <= 1e-11 * res_scale;
}

/// Active-set walk on the dual in the style of nonnegative least squares:
/// keeps a feasible simplex iterate supported on a working set, alternates
/// equality-constrained Newton solves with segment steps that stop where the
/// first weight reaches zero (dropping that piece), and admits the dominating
/// outside piece after each certified solve. Returns true if it improved the
/// certified gap over the seed.
bool try_refinement(const DualWorkspace& ws, const DualWorkspace::Eval& seed_eval,
                    const Vector& seed_lambda, double value_scale, double tol,
                    Vector& lambda_out, DualWorkspace::Eval& eval_out,
                    int& eval_budget_used) {
  const Index P = ws.P;
  const double tol_active = 1e-7 * value_scale + 0.1 * seed_eval.gap;

  std::vector<Index> work;
  for (Index p = 0; p < P; ++p) {
    if (seed_eval.v[p] >= seed_eval.vmax - tol_active || seed_lambda[p] > 1e-7) {
      work.push_back(p);
    }
  }
  if (work.empty()) return false;
  const size_t start_size = static_cast<size_t>(ws.n) + 1;
  if (work.size() > start_size) {
    std::sort(work.begin(), work.end(),
              [&](Index a, Index b) { return seed_eval.v[a] > seed_eval.v[b]; });
    work.resize(start_size);
    std::sort(work.begin(), work.end());
  }

  auto base_of = [&](const std::vector<Index>& set) {
    Vector base(static_cast<Index>(set.size()));
    double wsum = 0.0;
    for (size_t a = 0; a < set.size(); ++a) {
      base[static_cast<Index>(a)] = std::max(seed_lambda[set[a]], 0.0);
      wsum += base[static_cast<Index>(a)];
    }
    if (wsum > 1e-12) return Vector(base / wsum);
    return Vector(Vector::Constant(static_cast<Index>(set.size()),
                                   1.0 / static_cast<double>(set.size())));
  };

  Vector base = base_of(work);
  Vector d = seed_eval.d;
  double theta = seed_eval.vmax;
  bool improved = false;
  const int max_walk = 16 + 3 * static_cast<int>(P);

  for (int walk = 0; walk < max_walk; ++walk) {
    const Index A = static_cast<Index>(work.size());
    Vector lam = base;
    ++eval_budget_used;
    if (!newton_on_active_set(ws, work, d, lam, theta)) {
      // No solution on this set (pieces of one objective can pin d away from
      // the rest). Drop the member with the least weight, lowest value on
      // ties, and retry.
      if (work.size() <= 1) return improved;
      Index drop = 0;
      for (Index a = 1; a < A; ++a) {
        if (base[a] < base[drop] ||
            (base[a] == base[drop] &&
             seed_eval.v[work[static_cast<size_t>(a)]] <
                 seed_eval.v[work[static_cast<size_t>(drop)]])) {
          drop = a;
        }
      }
      std::vector<Index> next(work);
      next.erase(next.begin() + drop);
      Vector shrunk(A - 1);
      Index w = 0;
      for (Index a = 0; a < A; ++a) {
        if (a != drop) shrunk[w++] = base[a];
      }
      const double mass = shrunk.sum();
      base = mass > 1e-12 ? Vector(shrunk / mass)
                          : Vector(Vector::Constant(A - 1, 1.0 / static_cast<double>(A - 1)));
      work.swap(next);
      d = seed_eval.d;
      theta = seed_eval.vmax;
      continue;
    }

    if (lam.minCoeff() < -1e-12) {
      // Step from the feasible base toward the solution until the first
      // weight hits zero, then drop that piece and re-solve.
      double t = 1.0;
      Index drop = -1;
      for (Index a = 0; a < A; ++a) {
        if (lam[a] < 0.0 && base[a] - lam[a] > 0.0) {
          const double ta = base[a] / (base[a] - lam[a]);
          if (ta < t) {
            t = ta;
            drop = a;
          }
        }
      }
      if (drop < 0 || A <= 1) return improved;
      Vector stepped = base + t * (lam - base);
      stepped[drop] = 0.0;
      stepped = stepped.cwiseMax(0.0);
      stepped /= stepped.sum();
      std::vector<Index> next(work);
      Vector shrunk(A - 1);
      Index w = 0;
      for (Index a = 0; a < A; ++a) {
        if (a != drop) shrunk[w++] = stepped[a];
      }
      next.erase(next.begin() + drop);
      base = shrunk;
      work.swap(next);
      continue;
    }

    // Feasible solve: certify through the plain evaluator.
    base = lam.cwiseMax(0.0);
    base /= base.sum();
    Vector lambda = Vector::Zero(P);
    for (Index a = 0; a < A; ++a) lambda[work[static_cast<size_t>(a)]] = base[a];
    ++eval_budget_used;
    const DualWorkspace::Eval polished = ws.evaluate(lambda);
    if (polished.gap < (improved ? eval_out.gap : seed_eval.gap)) {
      lambda_out = lambda;
      eval_out = polished;
      improved = true;
    }
    if (polished.gap <= std::max(tol, 1e-15 * value_scale)) return improved;

    // A piece outside the working set dominates the model: admit it.
    Index admit = 0;
    polished.v.maxCoeff(&admit);
    if (polished.v[admit] <= theta + 1e-13 * value_scale ||
        std::find(work.begin(), work.end(), admit) != work.end()) {
      return improved;
    }
    std::vector<Index> next(work);
    const auto pos = std::upper_bound(next.begin(), next.end(), admit);
    const Index offset = static_cast<Index>(pos - next.begin());
    next.insert(pos, admit);
    Vector grown(A + 1);
    grown.segment(0, offset) = base.segment(0, offset);
    grown[offset] = 0.0;
    grown.segment(offset + 1, A - offset) = base.segment(offset, A - offset);
    base = grown;
    work.swap(next);
    d = polished.d;
    theta = polished.vmax;
  }
  return improved;
}

}  // namespace

std::vector<QuadraticPiece> build_pieces(const Vector& x, const ProblemInstance& p,
                                         const MetricSet& metrics) {
  if (x.size() != p.dim()) {
    throw std::invalid_argument("build_pieces: x dimension mismatch");
  }
  if (metrics.dim() != p.dim() || metrics.count() != p.objectives()) {
    throw std::invalid_argument("build_pieces: metrics shape mismatch");
  }
  std::vector<QuadraticPiece> pieces;
  for (Index i = 0; i < p.objectives(); ++i) {
    const Vector grad = p.smooth(i).grad(x);
    const auto& h = p.nonsmooth(i).pieces();
    double hx = -std::numeric_limits<double>::infinity();
    std::vector<double> piece_at_x(h.size());
    for (size_t j = 0; j < h.size(); ++j) {
      piece_at_x[j] = h[j].a.dot(x) + h[j].b;
      hx = std::max(hx, piece_at_x[j]);
    }
    for (size_t j = 0; j < h.size(); ++j) {
      pieces.push_back(QuadraticPiece{grad + h[j].a, piece_at_x[j] - hx, i});
    }
  }
  return pieces;
}

double theta_at(const Vector& x, const Vector& d, const ProblemInstance& p,
                const MetricSet& metrics) {
  if (x.size() != p.dim() || d.size() != p.dim()) {
    throw std::invalid_argument("theta_at: dimension mismatch");
  }
  const Vector xd = x + d;
  double theta = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < p.objectives(); ++i) {
    const double model = p.smooth(i).grad(x).dot(d) + 0.5 * metrics.quad(i, d) +
                         p.nonsmooth(i).eval(xd) - p.nonsmooth(i).eval(x);
    theta = std::max(theta, model);
  }
  return theta;
}

std::pair<double, Vector> dual_value(const Vector& lambda,
                                     const std::vector<QuadraticPiece>& pieces,
                                     const MetricSet& metrics, double omega) {
  const Index P = static_cast<Index>(pieces.size());
  if (lambda.size() != P) {
    throw std::invalid_argument("dual_value: lambda size mismatch");
  }
  if (P == 0) throw std::invalid_argument("dual_value: no pieces");
  if (!(omega > 0)) throw std::invalid_argument("dual_value: omega must be > 0");
  if (lambda.minCoeff() < -1e-9 || std::abs(lambda.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("dual_value: lambda is not on the simplex");
  }
  const Index n = pieces.front().lin.size();
  Matrix H = Matrix::Identity(n, n) * omega;
  Vector g = Vector::Zero(n);
  double cbar = 0.0;
  for (Index p = 0; p < P; ++p) {
    const auto& piece = pieces[static_cast<size_t>(p)];
    metrics.accumulate(H, piece.metric_index, lambda[p]);
    g.noalias() += lambda[p] * piece.lin;
    cbar += lambda[p] * piece.c;
  }
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("dual_value: H(lambda) factorization failed");
  }
  const Vector d = llt.solve(-g);
  return {cbar + 0.5 * g.dot(d), d};
}

SubproblemSolution solve_direction(const Vector& x, const ProblemInstance& p,
                                   const MetricSet& metrics, double omega, double tol,
                                   const SubproblemOptions& opts) {
  if (!(omega > 0)) throw std::invalid_argument("solve_direction: omega must be > 0");
  if (!x.allFinite()) {
    throw SubproblemError("solve_direction: x is not finite", Vector::Zero(p.dim()),
                          std::numeric_limits<double>::infinity());
  }

  const std::vector<QuadraticPiece> pieces = build_pieces(x, p, metrics);
  const Index P = static_cast<Index>(pieces.size());
  const Index n = p.dim();

  DualWorkspace ws;
  ws.metrics = &metrics;
  ws.omega = omega;
  ws.n = n;
  ws.m = p.objectives();
  ws.P = P;
  ws.lins.resize(n, P);
  ws.c.resize(P);
  ws.owner.resize(static_cast<size_t>(P));
  for (Index q = 0; q < P; ++q) {
    const auto& piece = pieces[static_cast<size_t>(q)];
    ws.lins.col(q) = piece.lin;
    ws.c[q] = piece.c;
    ws.owner[static_cast<size_t>(q)] = piece.metric_index;
  }
  if (!ws.lins.allFinite() || !ws.c.allFinite()) {
    throw SubproblemError("solve_direction: non-finite model pieces", Vector::Zero(n),
                          std::numeric_limits<double>::infinity());
  }

  Vector lambda;
  if (opts.initial_weights != nullptr) {
    if (opts.initial_weights->size() != P) {
      throw std::invalid_argument("solve_direction: initial weights size mismatch");
    }
    lambda = project_simplex(*opts.initial_weights);
  } else {
    lambda = Vector::Zero(P);
    Index actives = 0;
    for (Index q = 0; q < P; ++q) {
      if (ws.c[q] >= -1e-12) {
        lambda[q] = 1.0;
        ++actives;
      }
    }
    if (actives == 0) {  // reachable only if every piece offset is below -1e-12
      lambda.setConstant(1.0);
      actives = P;
    }
    lambda /= static_cast<double>(actives);
  }

  const double value_scale =
      1.0 + ws.c.cwiseAbs().maxCoeff() + ws.lins.cwiseAbs().maxCoeff();

  int evals = 0;
  DualWorkspace::Eval cur = ws.evaluate(lambda);
  ++evals;
  if (!cur.d.allFinite() || !std::isfinite(cur.gap)) {
    throw SubproblemError("solve_direction: non-finite dual evaluation", Vector::Zero(n),
                          std::numeric_limits<double>::infinity());
  }

  // Best primal iterate (lowest phi) and best dual iterate (highest psi) seen;
  // the certified gap pairs the two.
  Vector best_primal_d = cur.d;
  double best_phi = cur.phi;
  Vector best_dual_lambda = lambda;
  double best_psi = cur.psi;
  double best_gap = std::max(0.0, best_phi - best_psi);

  int next_refinement = 0;
  double step = 1.0 / value_scale;

  auto absorb = [&](const Vector& lam, const DualWorkspace::Eval& e) {
    if (e.phi < best_phi && e.d.allFinite()) {
      best_phi = e.phi;
      best_primal_d = e.d;
    }
    if (e.psi > best_psi && std::isfinite(e.psi)) {
      best_psi = e.psi;
      best_dual_lambda = lam;
    }
    best_gap = std::min(best_gap, std::max(0.0, best_phi - best_psi));
  };

  while (true) {
    if (best_gap <= tol) break;
    if (evals >= opts.max_iter) {
      throw SubproblemError("solve_direction: iteration budget exhausted (gap " +
                                std::to_string(best_gap) + ")",
                            best_primal_d, best_gap);
    }

    if (evals >= next_refinement) {
      Vector refined_lambda;
      DualWorkspace::Eval refined;
      DualWorkspace::Eval seed = ws.evaluate(best_dual_lambda);
      ++evals;
      absorb(best_dual_lambda, seed);
      if (try_refinement(ws, seed, best_dual_lambda, value_scale, tol, refined_lambda,
                         refined, evals)) {
        absorb(refined_lambda, refined);
        cur = refined;
        lambda = refined_lambda;
        if (best_gap <= tol) break;
      }
      next_refinement = evals + 20;
      continue;
    }

    // Projected gradient ascent on psi (concave, gradient v(d(lambda))) with
    // a monotone backtracking step.
    const Vector candidate = project_simplex(lambda + step * cur.v);
    DualWorkspace::Eval trial = ws.evaluate(candidate);
    ++evals;
    if (!trial.d.allFinite() || !std::isfinite(trial.gap)) {
      throw SubproblemError("solve_direction: non-finite dual evaluation", best_primal_d,
                            best_gap);
    }
    absorb(candidate, trial);
    if (trial.psi > cur.psi) {
      lambda = candidate;
      cur = trial;
      step = std::min(step * 1.5, 1e12);
    } else {
      step *= 0.25;
    }
  }

  SubproblemSolution sol;
  sol.d = best_primal_d;
  sol.theta = theta_at(x, sol.d, p, metrics);
  sol.beta = sol.theta + 0.5 * omega * sol.d.squaredNorm();
  sol.gap = best_gap;
  sol.weights = best_dual_lambda;
  sol.iterations = evals;
  return sol;
}

}  // namespace proxmo
