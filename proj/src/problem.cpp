#include "proxmo/problem.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace proxmo {

namespace {

void check_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " +
                                std::to_string(got) + ")");
  }
}

}  // namespace

PiecewiseAffine::PiecewiseAffine(std::vector<AffinePiece> pieces)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) {
    throw std::invalid_argument("PiecewiseAffine: at least one piece required");
  }
  const Index n = pieces_.front().a.size();
  for (const auto& piece : pieces_) {
    check_dim(n, piece.a.size(), "PiecewiseAffine");
    if (!piece.a.allFinite() || !std::isfinite(piece.b)) {
      throw std::invalid_argument("PiecewiseAffine: pieces must be finite");
    }
  }
}

PiecewiseAffine PiecewiseAffine::zero(Index n) {
  return PiecewiseAffine({AffinePiece{Vector::Zero(n), 0.0}});
}

double PiecewiseAffine::eval(const Vector& x) const {
  check_dim(dim(), x.size(), "PiecewiseAffine::eval");
  double best = pieces_.front().a.dot(x) + pieces_.front().b;
  for (size_t j = 1; j < pieces_.size(); ++j) {
    best = std::max(best, pieces_[j].a.dot(x) + pieces_[j].b);
  }
  return best;
}

Index PiecewiseAffine::argmax(const Vector& x) const {
  check_dim(dim(), x.size(), "PiecewiseAffine::argmax");
  Index best = 0;
  double best_val = pieces_.front().a.dot(x) + pieces_.front().b;
  for (size_t j = 1; j < pieces_.size(); ++j) {
    const double v = pieces_[j].a.dot(x) + pieces_[j].b;
    if (v > best_val) {
      best_val = v;
      best = static_cast<Index>(j);
    }
  }
  return best;
}

QuadraticObjective::QuadraticObjective(Matrix Q, Vector q) : q_(std::move(q)) {
  if (Q.rows() != Q.cols()) {
    throw std::invalid_argument("QuadraticObjective: Q must be square");
  }
  check_dim(Q.rows(), q_.size(), "QuadraticObjective");
  const double scale = Q.cwiseAbs().maxCoeff();
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  symmetrized_ = scale > 0.0 && asym > 1e-12 * scale;
  Q_ = 0.5 * (Q + Q.transpose());
  Eigen::LLT<Matrix> llt(Q_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "QuadraticObjective: Q must be positive definite (Cholesky failed)");
  }
}

double QuadraticObjective::eval(const Vector& x) const {
  check_dim(dim(), x.size(), "QuadraticObjective::eval");
  return 0.5 * x.dot(Q_ * x) + q_.dot(x);
}

Vector QuadraticObjective::grad(const Vector& x) const {
  check_dim(dim(), x.size(), "QuadraticObjective::grad");
  return Q_ * x + q_;
}

ProblemInstance::ProblemInstance(std::vector<QuadraticObjective> smooth,
                                 std::vector<PiecewiseAffine> nonsmooth)
    : smooth_(std::move(smooth)), nonsmooth_(std::move(nonsmooth)) {
  if (smooth_.empty() || smooth_.size() != nonsmooth_.size()) {
    throw std::invalid_argument(
        "ProblemInstance: need m >= 1 objectives with matching smooth/nonsmooth parts");
  }
  const Index n = smooth_.front().dim();
  for (const auto& g : smooth_) check_dim(n, g.dim(), "ProblemInstance");
  for (const auto& h : nonsmooth_) check_dim(n, h.dim(), "ProblemInstance");
}

double eval_smooth(const QuadraticObjective& obj, const Vector& x) { return obj.eval(x); }

Vector grad_smooth(const QuadraticObjective& obj, const Vector& x) { return obj.grad(x); }

double eval_nonsmooth(const PiecewiseAffine& h, const Vector& x) { return h.eval(x); }

Vector eval_F(const ProblemInstance& p, const Vector& x) {
  Vector F(p.objectives());
  for (Index i = 0; i < p.objectives(); ++i) {
    F[i] = p.smooth(i).eval(x) + p.nonsmooth(i).eval(x);
  }
  return F;
}

}  // namespace proxmo
