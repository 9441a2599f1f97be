#ifndef PROXMO_IO_HPP
#define PROXMO_IO_HPP

#include <string>

#include <json.hpp>

#include "proxmo/problem.hpp"

namespace proxmo {

/// Parses the instance document:
///   {"n": int, "m": int,
///    "Q": [m matrices, each n rows of n numbers (or flat n*n, row-major)],
///    "q": [m vectors of n numbers],
///    "h": [m entries]}
/// where each h entry is either {"pieces": [[[a...], b], ...]} or an
/// uncertainty-set descriptor {"type": "box"|"transformed_box"|"hpolytope",
/// "delta": ..., "B": ..., "A": ..., "b": ...} converted via its support
/// function.
ProblemInstance parse_instance(const nlohmann::json& doc);
ProblemInstance read_instance(const std::string& path);

/// Serializes with explicit piece lists; numeric values survive a round trip
/// bit-for-bit (17-significant-digit decimal fidelity).
nlohmann::json instance_to_json(const ProblemInstance& p);
void write_instance(const ProblemInstance& p, const std::string& path);

/// Reads a point as whitespace/comma-separated decimals.
Vector read_point(const std::string& path);

/// Shortest decimal form that parses back to exactly v (at most 17
/// significant digits).
std::string format_double(double v);

}  // namespace proxmo

#endif  // PROXMO_IO_HPP
