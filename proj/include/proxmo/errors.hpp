#ifndef PROXMO_ERRORS_HPP
#define PROXMO_ERRORS_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace proxmo {

/// Enumeration or search budget exceeded (vertex counts, redraw attempts).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that must be invertible (or well conditioned) is not.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// An uncertainty set is empty or unbounded, so its support function is undefined.
class InvalidSetError : public std::runtime_error {
 public:
  explicit InvalidSetError(const std::string& what) : std::runtime_error(what) {}
};

/// The direction subproblem failed to certify its tolerance within budget.
/// Carries the best iterate found and the duality gap it achieved.
class SubproblemError : public std::runtime_error {
 public:
  SubproblemError(const std::string& what, Eigen::VectorXd best_d, double gap)
      : std::runtime_error(what), best_d(std::move(best_d)), gap(gap) {}

  Eigen::VectorXd best_d;
  double gap;
};

}  // namespace proxmo

#endif  // PROXMO_ERRORS_HPP
