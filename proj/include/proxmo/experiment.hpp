#ifndef PROXMO_EXPERIMENT_HPP
#define PROXMO_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "proxmo/problem.hpp"
#include "proxmo/solver.hpp"

namespace proxmo {

struct ExperimentConfig {
  std::uint64_t seed = 0;
  Index n = 5;
  Index m = 2;
  int runs = 100;
  std::vector<double> deltas = {0.0, 0.05, 0.1};
  std::vector<UpdateKind> methods = {UpdateKind::FROZEN_ZERO, UpdateKind::BFGS,
                                     UpdateKind::SSBFGS, UpdateKind::HBFGS};
  bool line_search = true;
  bool fixed_instance = false;  ///< share run 0's instance; only x0 varies per run
  bool svg = false;
  int threads = 0;              ///< 0 = hardware concurrency
  SolverConfig solver;          ///< omega/tau/zeta/eps (method and line_search are overridden per run)
};

struct FrontierRecord {
  int run_id = 0;
  double delta = 0.0;
  UpdateKind method = UpdateKind::BFGS;
  bool line_search = true;
  RunStatus status = RunStatus::MaxIter;
  int iterations = 0;
  double wallclock_ms = 0.0;
  bool nondominated = false;
  Vector F;
  Vector x;
};

struct GeneratedInstance {
  ProblemInstance problem;
  Vector x0;
  Matrix transform;  ///< the matrix B defining the second objective's uncertainty
};

/// Deterministic instance per (seed, run_index): Q_i = M_i M_i' with M_i, q_i,
/// B, x0 drawn from the documented normal stream (see rng.hpp); h_1 is the
/// support function of the delta-box, h_2 of the B-transformed box. delta = 0
/// gives h_i identically zero. Draws that fail conditioning checks (smallest
/// singular value of M_i < 1e-8, reciprocal condition of B < 1e-6) are
/// redrawn, at most 100 attempts each.
GeneratedInstance generate_instance(std::uint64_t seed, int run_index, Index n,
                                    Index m, double delta);

/// Executes every (delta, method, run) combination and returns records in
/// deterministic (delta, method, run_id) order with nondominated flags set
/// per (delta, method) group. Individual run failures land in the status
/// column; they never abort the batch.
std::vector<FrontierRecord> run_batch(const ExperimentConfig& cfg);

/// Marks each record nondominated iff no other record in its (delta, method)
/// group weakly dominates it. Records with non-finite F are dominated by fiat.
void pareto_filter(std::vector<FrontierRecord>& records);

/// Writes records.csv (17-significant-digit decimals) and, when cfg.svg is
/// set and m = 2, one frontier scatter SVG per delta, into out_dir.
/// Returns the paths written.
std::vector<std::string> write_outputs(const std::vector<FrontierRecord>& records,
                                       const ExperimentConfig& cfg,
                                       const std::string& out_dir);

/// The records.csv header for dimension n, m: run_id,delta,method,...,F1..Fm,x1..xn.
std::string frontier_csv_header(Index n, Index m);

/// One CSV line for a record (no trailing newline).
std::string frontier_csv_line(const FrontierRecord& r);

}  // namespace proxmo

#endif  // PROXMO_EXPERIMENT_HPP
