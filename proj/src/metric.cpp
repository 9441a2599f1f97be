#include "proxmo/metric.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace proxmo {

std::string to_string(UpdateKind kind) {
  switch (kind) {
    case UpdateKind::BFGS: return "bfgs";
    case UpdateKind::SSBFGS: return "ssbfgs";
    case UpdateKind::HBFGS: return "hbfgs";
    case UpdateKind::FROZEN_ZERO: return "pgm";
  }
  throw std::invalid_argument("to_string: unknown UpdateKind");
}

UpdateKind parse_update_kind(const std::string& name) {
  if (name == "bfgs") return UpdateKind::BFGS;
  if (name == "ssbfgs") return UpdateKind::SSBFGS;
  if (name == "hbfgs") return UpdateKind::HBFGS;
  if (name == "pgm") return UpdateKind::FROZEN_ZERO;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected pgm|bfgs|ssbfgs|hbfgs)");
}

MetricSet MetricSet::identity(Index m, Index n, double scale) {
  if (m < 1 || n < 1) throw std::invalid_argument("MetricSet::identity: m, n must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("MetricSet::identity: scale must be > 0");
  MetricSet set;
  set.dim_ = n;
  set.mats_.assign(static_cast<size_t>(m), Matrix::Identity(n, n) * scale);
  return set;
}

MetricSet MetricSet::frozen_zero(Index m, Index n) {
  if (m < 1 || n < 1) throw std::invalid_argument("MetricSet::frozen_zero: m, n must be >= 1");
  MetricSet set;
  set.dim_ = n;
  set.zero_ = true;
  set.mats_.assign(static_cast<size_t>(m), Matrix::Zero(n, n));
  return set;
}

MetricSet MetricSet::from_matrices(std::vector<Matrix> mats) {
  if (mats.empty()) throw std::invalid_argument("MetricSet::from_matrices: empty list");
  MetricSet set;
  set.dim_ = mats.front().rows();
  for (auto& B : mats) {
    if (B.rows() != set.dim_ || B.cols() != set.dim_) {
      throw std::invalid_argument("MetricSet::from_matrices: shapes inconsistent");
    }
    const double scale = B.cwiseAbs().maxCoeff();
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1e-300)) {
      throw std::invalid_argument("MetricSet::from_matrices: matrix not symmetric");
    }
    B = 0.5 * (B + B.transpose());
    if (Eigen::LLT<Matrix>(B).info() != Eigen::Success) {
      throw std::invalid_argument("MetricSet::from_matrices: matrix not positive definite");
    }
  }
  set.mats_ = std::move(mats);
  return set;
}

double MetricSet::quad(Index i, const Vector& d) const {
  if (zero_) return 0.0;
  const Matrix& B = mats_.at(static_cast<size_t>(i));
  return d.dot(B * d);
}

void MetricSet::accumulate(Matrix& H, Index i, double w) const {
  if (zero_) return;
  H.noalias() += w * mats_.at(static_cast<size_t>(i));
}

void MetricSet::set(Index i, Matrix B) {
  if (zero_) {
    throw std::logic_error("MetricSet::set: frozen-zero metrics are immutable");
  }
  if (B.rows() != dim_ || B.cols() != dim_) {
    throw std::invalid_argument("MetricSet::set: shape mismatch");
  }
  mats_.at(static_cast<size_t>(i)) = std::move(B);
}

Matrix bfgs_update(const Matrix& B, const Vector& s, const Vector& y) {
  const Vector Bs = B * s;
  const double sBs = s.dot(Bs);
  const double sy = s.dot(y);
  Matrix out = B;
  out.noalias() -= (Bs * Bs.transpose()) / sBs;
  out.noalias() += (y * y.transpose()) / sy;
  return out;
}

Matrix ss_bfgs_update(const Matrix& B, const Vector& s, const Vector& y) {
  const Vector Bs = B * s;
  const double sBs = s.dot(Bs);
  const double sy = s.dot(y);
  Matrix out = B;
  out.noalias() -= (Bs * Bs.transpose()) / sBs;
  out *= sy / sBs;
  out.noalias() += (y * y.transpose()) / sy;
  return out;
}

double huang_theta(double g_k, double g_k1, const Vector& grad_k,
                   const Vector& grad_k1, const Vector& s) {
  return 6.0 * (g_k - g_k1) + 3.0 * (grad_k + grad_k1).dot(s);
}

Matrix h_bfgs_update(const Matrix& B, const Vector& s, const Vector& y, double theta) {
  const double sy = s.dot(y);
  const Vector yhat = (1.0 + theta / sy) * y;
  return bfgs_update(B, s, yhat);
}

bool curvature_guard(const Vector& s, const Vector& y, const Matrix& B) {
  const double sn = s.norm();
  if (!(sn > 1e-14)) return false;
  const double sy = s.dot(y);
  if (!(sy > 1e-12 * sn * y.norm())) return false;
  const double sBs = s.dot(B * s);
  return sBs > 1e-14;
}

double lipschitz_bound(const ProblemInstance& p) {
  double bound = 0.0;
  for (Index i = 0; i < p.objectives(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.smooth(i).Q(), Eigen::EigenvaluesOnly);
    bound = std::max(bound, es.eigenvalues().maxCoeff());
  }
  return bound;
}

}  // namespace proxmo
