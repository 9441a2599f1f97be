// proxmo command-line interface: single-instance solves, the seeded
// experiment batch, and the stationarity check.
//
// Exit codes: 0 on success, 2 for invalid configuration or unreadable input,
// 3 when any requested run fails (line-search or subproblem failure; for
// `check`, a point that fails the certificate).

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxmo/errors.hpp"
#include "proxmo/experiment.hpp"
#include "proxmo/io.hpp"
#include "proxmo/oracles.hpp"
#include "proxmo/problem.hpp"
#include "proxmo/solver.hpp"

namespace {

using namespace proxmo;

int run_solve(const std::string& instance_path, const std::string& x0_path,
              const std::string& method_name, bool no_line_search,
              const SolverConfig& base, const std::string& out_path) {
  const ProblemInstance p = read_instance(instance_path);
  Vector x0 = Vector::Zero(p.dim());
  if (!x0_path.empty()) {
    x0 = read_point(x0_path);
    if (x0.size() != p.dim()) {
      throw std::invalid_argument("point file dimension " + std::to_string(x0.size()) +
                                  " does not match instance dimension " +
                                  std::to_string(p.dim()));
    }
  }

  SolverConfig cfg = base;
  cfg.method = parse_update_kind(method_name);
  cfg.line_search = !no_line_search;

  const RunResult result = run(p, x0, cfg);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
  out << "iteration,dnorm,beta,theta,step,backtracks,gap,sub_iterations";
  for (Index i = 1; i <= p.objectives(); ++i) out << ",F" << i;
  out << "\n";
  for (size_t k = 0; k < result.trace.size(); ++k) {
    const TraceRow& row = result.trace[k];
    out << k << ',' << format_double(row.dnorm) << ',' << format_double(row.beta) << ','
        << format_double(row.theta) << ',' << format_double(row.step) << ','
        << row.backtracks << ',' << format_double(row.gap) << ',' << row.sub_iterations;
    for (Index i = 0; i < row.F.size(); ++i) out << ',' << format_double(row.F[i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + out_path);

  std::cout << "status: " << to_string(result.status) << "\n"
            << "iterations: " << result.iterations << "\n"
            << "final dnorm: " << format_double(result.final_dnorm) << "\n";
  std::cout << "x_final:";
  for (Index i = 0; i < result.x_final.size(); ++i) {
    std::cout << ' ' << format_double(result.x_final[i]);
  }
  std::cout << "\nF_final:";
  for (Index i = 0; i < result.F_final.size(); ++i) {
    std::cout << ' ' << format_double(result.F_final[i]);
  }
  std::cout << "\ntrace: " << out_path << "\n";
  for (const std::string& w : result.warnings) std::cout << "warning: " << w << "\n";

  const bool failed = result.status == RunStatus::LineSearchFailure ||
                      result.status == RunStatus::SubproblemFailure;
  return failed ? 3 : 0;
}

int run_experiment(const ExperimentConfig& cfg, const std::vector<std::string>& method_names,
                   const std::string& out_dir) {
  ExperimentConfig full = cfg;
  if (!method_names.empty()) {
    full.methods.clear();
    for (const std::string& name : method_names) {
      full.methods.push_back(parse_update_kind(name));
    }
  }
  const std::vector<FrontierRecord> records = run_batch(full);
  const std::vector<std::string> files = write_outputs(records, full, out_dir);

  int stationary = 0, failed = 0;
  for (const FrontierRecord& r : records) {
    if (r.status == RunStatus::Stationary) ++stationary;
    if (r.status == RunStatus::LineSearchFailure ||
        r.status == RunStatus::SubproblemFailure) {
      ++failed;
    }
  }
  std::cout << records.size() << " runs, " << stationary << " stationary, " << failed
            << " failed\n";
  for (const std::string& f : files) std::cout << "wrote " << f << "\n";
  return failed > 0 ? 3 : 0;
}

int run_check(const std::string& instance_path, const std::string& point_path,
              double omega, double eps, double tol) {
  const ProblemInstance p = read_instance(instance_path);
  const Vector x = read_point(point_path);
  if (x.size() != p.dim()) {
    throw std::invalid_argument("point file dimension " + std::to_string(x.size()) +
                                " does not match instance dimension " +
                                std::to_string(p.dim()));
  }
  if (tol <= 0) tol = 10.0 * omega * eps * eps;
  const CertificateReport report = stationarity_certificate(x, p, omega, tol);
  std::cout << (report.stationary ? "stationary" : "not stationary")
            << " (tol " << format_double(tol) << ")\n"
            << "beta estimate: " << format_double(report.beta_est) << "\n"
            << "beta via direction solve: " << format_double(report.beta_solver) << "\n"
            << "beta via subgradient oracle: " << format_double(report.beta_oracle) << "\n";
  return report.stationary ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxmo: proximal quasi-Newton solver for composite multiobjective "
               "problems"};
  app.require_subcommand(1);
  // Options live under a [solve] / [experiment] / [check] section in the file;
  // fallthrough lets --config follow the subcommand name.
  app.set_config("--config", "", "Read options from an INI/TOML file (flags win)");

  // --- solve ---
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance file");
  solve_cmd->fallthrough(true);
  std::string instance_path, x0_path, out_path, method_name = "bfgs";
  bool no_line_search = false;
  SolverConfig scfg;
  solve_cmd->add_option("--instance", instance_path, "Instance JSON file")->required();
  solve_cmd->add_option("--x0", x0_path, "Starting point file (default: origin)");
  solve_cmd->add_option("--method", method_name, "pgm|bfgs|ssbfgs|hbfgs");
  solve_cmd->add_flag("--no-line-search", no_line_search, "Fixed unit steps");
  solve_cmd->add_option("--omega", scfg.omega, "Proximal parameter (> 0)");
  solve_cmd->add_option("--tau", scfg.tau, "Armijo slope fraction in (0,1)");
  solve_cmd->add_option("--zeta", scfg.zeta, "Backtracking ratio in (0,1)");
  solve_cmd->add_option("--eps", scfg.eps, "Stop when ||d|| < eps");
  solve_cmd->add_option("--max-iter", scfg.max_iter, "Outer iteration budget");
  solve_cmd->add_flag("--auto-omega", scfg.auto_omega,
                      "Replace omega by 1.01*L/2 (L from the smooth parts)");
  solve_cmd->add_option("--out", out_path, "Trace CSV path")->required();

  // --- experiment ---
  auto* exp_cmd = app.add_subcommand("experiment", "Run the seeded batch protocol");
  exp_cmd->fallthrough(true);
  ExperimentConfig ecfg;
  std::vector<std::string> method_names;
  std::string out_dir;
  exp_cmd->add_option("--seed", ecfg.seed, "Master seed");
  exp_cmd->add_option("--runs", ecfg.runs, "Runs per (delta, method)");
  exp_cmd->add_option("--n", ecfg.n, "Problem dimension");
  exp_cmd->add_option("--m", ecfg.m, "Number of objectives");
  exp_cmd->add_option("--deltas", ecfg.deltas, "Uncertainty radii")->delimiter(',');
  exp_cmd->add_option("--methods", method_names, "Subset of pgm,bfgs,ssbfgs,hbfgs")
      ->delimiter(',');
  exp_cmd->add_flag("--no-line-search", "Fixed unit steps for every run");
  exp_cmd->add_flag("--fixed-instance", ecfg.fixed_instance,
                    "Share run 0's instance; only x0 varies");
  exp_cmd->add_flag("--svg", ecfg.svg, "Write per-delta frontier SVGs");
  exp_cmd->add_option("--threads", ecfg.threads, "Worker threads (0 = hardware)");
  exp_cmd->add_option("--omega", ecfg.solver.omega, "Proximal parameter (> 0)");
  exp_cmd->add_option("--tau", ecfg.solver.tau, "Armijo slope fraction in (0,1)");
  exp_cmd->add_option("--zeta", ecfg.solver.zeta, "Backtracking ratio in (0,1)");
  exp_cmd->add_option("--eps", ecfg.solver.eps, "Stop when ||d|| < eps");
  exp_cmd->add_option("--max-iter", ecfg.solver.max_iter, "Outer iteration budget");
  exp_cmd->add_flag("--auto-omega", ecfg.solver.auto_omega,
                    "Replace omega by 1.01*L/2 per instance");
  exp_cmd->add_option("--out-dir", out_dir, "Output directory")->required();

  // --- check ---
  auto* check_cmd = app.add_subcommand("check", "Certify Pareto stationarity of a point");
  check_cmd->fallthrough(true);
  std::string check_instance, check_point;
  double check_omega = 5.0, check_eps = 1e-6, check_tol = 0.0;
  check_cmd->add_option("--instance", check_instance, "Instance JSON file")->required();
  check_cmd->add_option("--point", check_point, "Point file (whitespace/comma separated)")
      ->required();
  check_cmd->add_option("--omega", check_omega, "Proximal parameter (> 0)");
  check_cmd->add_option("--eps", check_eps, "Reference stop threshold");
  check_cmd->add_option("--tol", check_tol,
                        "Stationarity tolerance (default 10*omega*eps^2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; anything else is bad config
  }

  try {
    if (*solve_cmd) {
      return run_solve(instance_path, x0_path, method_name, no_line_search, scfg, out_path);
    }
    if (*exp_cmd) {
      ecfg.line_search = exp_cmd->count("--no-line-search") == 0;
      return run_experiment(ecfg, method_names, out_dir);
    }
    if (*check_cmd) {
      return run_check(check_instance, check_point, check_omega, check_eps, check_tol);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidSetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
