#ifndef PROXMO_UNCERTAINTY_HPP
#define PROXMO_UNCERTAINTY_HPP

#include <vector>

#include "proxmo/problem.hpp"

namespace proxmo {

/// Vertices of the box {u : -delta <= u_i <= delta}, i = 1..n.
///
/// Returns exactly 2^n vertices in a fixed order: the first vertex is
/// (+delta, ..., +delta) and the last coordinate toggles fastest, so for
/// n = 2 the order is (+,+), (+,-), (-,+), (-,-). delta = 0 collapses the
/// box to the single zero vertex. Guarded at n <= 20.
std::vector<Vector> box_vertices(Index n, double delta);

/// Vertices of {u : -delta <= (Bu)_i <= delta}, i.e. the image of the box
/// under B^{-1}. B must be square and well conditioned (reciprocal condition
/// estimate > 1e-10).
std::vector<Vector> transformed_box_vertices(const Matrix& B, double delta);

/// Vertices of the polytope {u : Au <= b} by basic-solution enumeration.
///
/// Every subset of n rows with a nonsingular square system contributes a
/// candidate; candidates feasible to slack 1e-9 are kept and deduplicated at
/// distance 1e-9. The set must be nonempty and bounded; an unbounded
/// recession direction or an empty feasible set raises InvalidSetError.
/// The subset budget C(rows, n) is capped at 1e6.
std::vector<Vector> hpolytope_vertices(const Matrix& A, const Vector& b);

/// Support function h(x) = max_{u in U} u·x of the polytope with the given
/// vertices, as a piecewise-affine function with one piece (a = vertex, b = 0)
/// per vertex.
PiecewiseAffine support_function(const std::vector<Vector>& vertices);

}  // namespace proxmo

#endif  // PROXMO_UNCERTAINTY_HPP
