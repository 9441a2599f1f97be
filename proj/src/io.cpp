#include "proxmo/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "proxmo/uncertainty.hpp"

namespace proxmo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("instance: " + what);
}

Vector parse_vector(const json& node, Index n, const char* where) {
  if (!node.is_array() || static_cast<Index>(node.size()) != n) {
    fail(std::string(where) + " must be an array of length " + std::to_string(n));
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    if (!node[static_cast<size_t>(i)].is_number()) {
      fail(std::string(where) + " entries must be numbers");
    }
    v[i] = node[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

Matrix parse_matrix(const json& node, Index n, const char* where) {
  Matrix M(n, n);
  if (!node.is_array()) fail(std::string(where) + " must be an array");
  if (static_cast<Index>(node.size()) == n && n > 0 && node[0].is_array()) {
    for (Index i = 0; i < n; ++i) {
      const Vector row = parse_vector(node[static_cast<size_t>(i)], n, where);
      M.row(i) = row.transpose();
    }
    return M;
  }
  if (static_cast<Index>(node.size()) == n * n) {  // flat, row-major
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const auto& cell = node[static_cast<size_t>(i * n + j)];
        if (!cell.is_number()) fail(std::string(where) + " entries must be numbers");
        M(i, j) = cell.get<double>();
      }
    }
    return M;
  }
  fail(std::string(where) + " must be n rows of n numbers or flat n*n");
}

PiecewiseAffine parse_nonsmooth(const json& node, Index n) {
  if (node.contains("pieces")) {
    const json& arr = node.at("pieces");
    if (!arr.is_array() || arr.empty()) fail("h.pieces must be a nonempty array");
    std::vector<AffinePiece> pieces;
    for (const json& entry : arr) {
      if (!entry.is_array() || entry.size() != 2) {
        fail("each h piece must be [[a...], b]");
      }
      AffinePiece piece;
      piece.a = parse_vector(entry[0], n, "h piece slope");
      if (!entry[1].is_number()) fail("h piece offset must be a number");
      piece.b = entry[1].get<double>();
      pieces.push_back(std::move(piece));
    }
    return PiecewiseAffine(std::move(pieces));
  }
  if (!node.contains("type")) fail("h entry needs either \"pieces\" or \"type\"");
  const std::string type = node.at("type").get<std::string>();
  if (type == "box") {
    const double delta = node.at("delta").get<double>();
    return support_function(box_vertices(n, delta));
  }
  if (type == "transformed_box") {
    const double delta = node.at("delta").get<double>();
    const Matrix B = parse_matrix(node.at("B"), n, "h.B");
    return support_function(transformed_box_vertices(B, delta));
  }
  if (type == "hpolytope") {
    const json& An = node.at("A");
    if (!An.is_array() || An.empty()) fail("h.A must be a nonempty array of rows");
    const Index rows = static_cast<Index>(An.size());
    Matrix A(rows, n);
    for (Index i = 0; i < rows; ++i) {
      A.row(i) = parse_vector(An[static_cast<size_t>(i)], n, "h.A row").transpose();
    }
    const Vector b = parse_vector(node.at("b"), rows, "h.b");
    return support_function(hpolytope_vertices(A, b));
  }
  fail("unknown h type \"" + type + "\"");
}

}  // namespace

std::string format_double(double v) {
  // Shortest decimal that round-trips: try increasing precision.
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v || (std::isnan(back) && std::isnan(v))) return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ProblemInstance parse_instance(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("document must be a JSON object");
  if (!doc.contains("n") || !doc.contains("m")) fail("missing \"n\" or \"m\"");
  const Index n = doc.at("n").get<Index>();
  const Index m = doc.at("m").get<Index>();
  if (n < 1 || m < 1) fail("n and m must be >= 1");

  const json& Qs = doc.contains("Q") ? doc.at("Q") : json::array();
  const json& qs = doc.contains("q") ? doc.at("q") : json::array();
  const json& hs = doc.contains("h") ? doc.at("h") : json::array();
  if (static_cast<Index>(Qs.size()) != m) fail("\"Q\" must list m matrices");
  if (static_cast<Index>(qs.size()) != m) fail("\"q\" must list m vectors");
  if (static_cast<Index>(hs.size()) != m) fail("\"h\" must list m entries");

  std::vector<QuadraticObjective> smooth;
  std::vector<PiecewiseAffine> nonsmooth;
  for (Index i = 0; i < m; ++i) {
    smooth.emplace_back(parse_matrix(Qs[static_cast<size_t>(i)], n, "Q matrix"),
                        parse_vector(qs[static_cast<size_t>(i)], n, "q vector"));
    nonsmooth.push_back(parse_nonsmooth(hs[static_cast<size_t>(i)], n));
  }
  return ProblemInstance(std::move(smooth), std::move(nonsmooth));
}

ProblemInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("instance: " + path + ": " + err.what());
  }
  return parse_instance(doc);
}

nlohmann::json instance_to_json(const ProblemInstance& p) {
  const Index n = p.dim();
  const Index m = p.objectives();
  json doc;
  doc["n"] = n;
  doc["m"] = m;
  json Qs = json::array(), qs = json::array(), hs = json::array();
  for (Index i = 0; i < m; ++i) {
    const auto& g = p.smooth(i);
    json Q = json::array();
    for (Index r = 0; r < n; ++r) {
      json row = json::array();
      for (Index c = 0; c < n; ++c) row.push_back(g.Q()(r, c));
      Q.push_back(std::move(row));
    }
    Qs.push_back(std::move(Q));
    json q = json::array();
    for (Index r = 0; r < n; ++r) q.push_back(g.q()[r]);
    qs.push_back(std::move(q));

    json pieces = json::array();
    for (const AffinePiece& piece : p.nonsmooth(i).pieces()) {
      json a = json::array();
      for (Index r = 0; r < n; ++r) a.push_back(piece.a[r]);
      pieces.push_back(json::array({std::move(a), piece.b}));
    }
    hs.push_back(json{{"pieces", std::move(pieces)}});
  }
  doc["Q"] = std::move(Qs);
  doc["q"] = std::move(qs);
  doc["h"] = std::move(hs);
  return doc;
}

void write_instance(const ProblemInstance& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open instance file for writing: " + path);
  out << instance_to_json(p).dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing instance file: " + path);
}

Vector read_point(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file: " + path);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    // Accept comma-separated fields by splitting on commas inside the token.
    std::stringstream ss(token);
    std::string field;
    while (std::getline(ss, field, ',')) {
      if (field.empty()) continue;
      size_t consumed = 0;
      double v;
      try {
        v = std::stod(field, &consumed);
      } catch (const std::exception&) {
        throw std::invalid_argument("point file: cannot parse \"" + field + "\"");
      }
      if (consumed != field.size()) {
        throw std::invalid_argument("point file: trailing characters in \"" + field + "\"");
      }
      values.push_back(v);
    }
  }
  if (values.empty()) throw std::invalid_argument("point file: no values in " + path);
  Vector x(static_cast<Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) x[static_cast<Index>(i)] = values[i];
  return x;
}

}  // namespace proxmo
