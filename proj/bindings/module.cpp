// Python bindings: instance construction, single solves, direction solves,
// the stationarity certificate, and seeded instance generation.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "proxmo/experiment.hpp"
#include "proxmo/io.hpp"
#include "proxmo/oracles.hpp"
#include "proxmo/problem.hpp"
#include "proxmo/solver.hpp"
#include "proxmo/subproblem.hpp"

namespace py = pybind11;
using namespace proxmo;

namespace {

SolverConfig make_config(const std::string& method, bool line_search, double omega,
                         double tau, double zeta, double eps, int max_iter,
                         bool auto_omega) {
  SolverConfig cfg;
  cfg.method = parse_update_kind(method);
  cfg.line_search = line_search;
  cfg.omega = omega;
  cfg.tau = tau;
  cfg.zeta = zeta;
  cfg.eps = eps;
  cfg.max_iter = max_iter;
  cfg.auto_omega = auto_omega;
  return cfg;
}

py::dict result_to_dict(const RunResult& result) {
  py::dict out;
  out["x"] = result.x_final;
  out["F"] = result.F_final;
  out["status"] = to_string(result.status);
  out["iterations"] = result.iterations;
  out["final_dnorm"] = result.final_dnorm;
  out["final_beta"] = result.final_beta;
  out["warnings"] = result.warnings;

  const Index k = static_cast<Index>(result.trace.size());
  Vector dnorm(k), beta(k), theta(k), step(k), gap(k);
  Matrix F(k, k > 0 ? result.trace.front().F.size() : 0);
  for (Index i = 0; i < k; ++i) {
    const TraceRow& row = result.trace[static_cast<size_t>(i)];
    dnorm[i] = row.dnorm;
    beta[i] = row.beta;
    theta[i] = row.theta;
    step[i] = row.step;
    gap[i] = row.gap;
    F.row(i) = row.F.transpose();
  }
  py::dict trace;
  trace["dnorm"] = dnorm;
  trace["beta"] = beta;
  trace["theta"] = theta;
  trace["step"] = step;
  trace["gap"] = gap;
  trace["F"] = F;
  out["trace"] = trace;
  return out;
}

}  // namespace

PYBIND11_MODULE(_proxmo, m) {
  m.doc() = "Proximal quasi-Newton solver for composite multiobjective problems";

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_property_readonly("n", &ProblemInstance::dim)
      .def_property_readonly("m", &ProblemInstance::objectives)
      .def("F", [](const ProblemInstance& p, const Vector& x) { return eval_F(p, x); },
           py::arg("x"), "Objective vector F(x)")
      .def("to_json",
           [](const ProblemInstance& p) { return instance_to_json(p).dump(2); },
           "Serialize to the instance JSON document");

  m.def("instance_from_json",
        [](const std::string& text) { return parse_instance(nlohmann::json::parse(text)); },
        py::arg("text"), "Parse an instance JSON document");
  m.def("read_instance", &read_instance, py::arg("path"),
        "Read an instance JSON file");

  m.def("generate_instance",
        [](std::uint64_t seed, int run_index, Index n, Index m_, double delta) {
          GeneratedInstance gen = generate_instance(seed, run_index, n, m_, delta);
          return py::make_tuple(std::move(gen.problem), std::move(gen.x0));
        },
        py::arg("seed"), py::arg("run_index") = 0, py::arg("n") = 5, py::arg("m") = 2,
        py::arg("delta") = 0.0,
        "Seeded random instance and starting point (the batch protocol's draws)");

  m.def("solve",
        [](const ProblemInstance& p, const Vector& x0, const std::string& method,
           bool line_search, double omega, double tau, double zeta, double eps,
           int max_iter, bool auto_omega) {
          return result_to_dict(run(p, x0, make_config(method, line_search, omega, tau,
                                                       zeta, eps, max_iter, auto_omega)));
        },
        py::arg("instance"), py::arg("x0"), py::arg("method") = "bfgs",
        py::arg("line_search") = true, py::arg("omega") = 5.0, py::arg("tau") = 0.5,
        py::arg("zeta") = 0.5, py::arg("eps") = 1e-6, py::arg("max_iter") = 10000,
        py::arg("auto_omega") = false,
        "Run the outer iteration; returns a dict with x, F, status, and the trace");

  m.def("direction",
        [](const ProblemInstance& p, const Vector& x, double omega, bool pgm, double tol) {
          const MetricSet metrics = pgm ? MetricSet::frozen_zero(p.objectives(), p.dim())
                                        : MetricSet::identity(p.objectives(), p.dim());
          const SubproblemSolution sol = solve_direction(x, p, metrics, omega, tol);
          py::dict out;
          out["d"] = sol.d;
          out["beta"] = sol.beta;
          out["theta"] = sol.theta;
          out["gap"] = sol.gap;
          out["weights"] = sol.weights;
          out["iterations"] = sol.iterations;
          return out;
        },
        py::arg("instance"), py::arg("x"), py::arg("omega") = 5.0, py::arg("pgm") = false,
        py::arg("tol") = 1e-12,
        "Solve the direction subproblem at x with identity (or zero) metrics");

  m.def("certify",
        [](const ProblemInstance& p, const Vector& x, double omega, double tol) {
          const CertificateReport report = stationarity_certificate(x, p, omega, tol);
          py::dict out;
          out["stationary"] = report.stationary;
          out["beta_est"] = report.beta_est;
          out["beta_solver"] = report.beta_solver;
          out["beta_oracle"] = report.beta_oracle;
          return out;
        },
        py::arg("instance"), py::arg("x"), py::arg("omega") = 5.0, py::arg("tol") = 5e-11,
        "Independent Pareto-stationarity certificate at x");
}
