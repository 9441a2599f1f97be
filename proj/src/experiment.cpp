#include "proxmo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/SVD>

#include "proxmo/errors.hpp"
#include "proxmo/io.hpp"
#include "proxmo/rng.hpp"
#include "proxmo/uncertainty.hpp"

namespace proxmo {

namespace {

/// Draws an n x n matrix whose smallest singular value clears `floor`,
/// redrawing at most 100 times.
Matrix draw_conditioned(NormalStream& stream, Index n, double floor, bool relative,
                        const char* what) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix M = stream.matrix(n, n);
    Eigen::JacobiSVD<Matrix> svd(M);
    const double smallest = svd.singularValues().minCoeff();
    const double gate = relative ? smallest / svd.singularValues().maxCoeff() : smallest;
    if (gate >= floor) return M;
  }
  throw CapacityError(std::string("generate_instance: 100 redraws exhausted for ") + what);
}

struct GroupKey {
  double delta;
  UpdateKind method;
  bool operator<(const GroupKey& o) const {
    if (delta != o.delta) return delta < o.delta;
    return static_cast<int>(method) < static_cast<int>(o.method);
  }
};

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 0) {
    std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
    return 0.5 * (values[mid - 1] + hi);
  }
  return hi;
}

std::string svg_color(UpdateKind method) {
  switch (method) {
    case UpdateKind::FROZEN_ZERO: return "#7f7f7f";
    case UpdateKind::BFGS: return "#1f77b4";
    case UpdateKind::SSBFGS: return "#2ca02c";
    case UpdateKind::HBFGS: return "#d62728";
  }
  return "#000000";
}

/// Two-objective scatter of final F values, one color per method,
/// nondominated points drawn solid and enlarged.
std::string frontier_svg(const std::vector<const FrontierRecord*>& records) {
  const double W = 640, H = 480;
  const double ml = 64, mr = 128, mt = 24, mb = 48;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const FrontierRecord* r : records) {
    if (!r->F.allFinite()) continue;
    xmin = std::min(xmin, r->F[0]);
    xmax = std::max(xmax, r->F[0]);
    ymin = std::min(ymin, r->F[1]);
    ymax = std::max(ymax, r->F[1]);
  }
  if (!(xmin <= xmax)) {  // no finite points at all
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  const double xpad = (xmax > xmin) ? 0.05 * (xmax - xmin) : 0.5;
  const double ypad = (ymax > ymin) ? 0.05 * (ymax - ymin) : 0.5;
  xmin -= xpad; xmax += xpad;
  ymin -= ypad; ymax += ypad;

  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto sy = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << (H - mb) << "\" x2=\"" << (W - mr)
      << "\" y2=\"" << (H - mb) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << (H - mb) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    svg << "<text x=\"" << sx(fx) << "\" y=\"" << (H - mb + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    svg << "<text x=\"" << (ml - 6) << "\" y=\"" << (sy(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  svg << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 10)
      << "\" font-size=\"13\" text-anchor=\"middle\">F1</text>\n";
  svg << "<text x=\"16\" y=\"" << (mt + (H - mt - mb) / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + (H - mt - mb) / 2) << ")\">F2</text>\n";

  // legend: the methods present, in first-appearance order
  std::vector<UpdateKind> seen;
  for (const FrontierRecord* r : records) {
    if (std::find(seen.begin(), seen.end(), r->method) == seen.end()) {
      seen.push_back(r->method);
    }
  }
  double ly = mt + 10;
  for (UpdateKind method : seen) {
    svg << "<circle cx=\"" << (W - mr + 16) << "\" cy=\"" << ly << "\" r=\"4\" fill=\""
        << svg_color(method) << "\"/>\n";
    svg << "<text x=\"" << (W - mr + 26) << "\" y=\"" << (ly + 4)
        << "\" font-size=\"12\">" << to_string(method) << "</text>\n";
    ly += 18;
  }

  // dominated points first so the frontier stays on top
  for (const bool frontier_pass : {false, true}) {
    for (const FrontierRecord* r : records) {
      if (!r->F.allFinite() || r->nondominated != frontier_pass) continue;
      if (frontier_pass) {
        svg << "<circle cx=\"" << sx(r->F[0]) << "\" cy=\"" << sy(r->F[1])
            << "\" r=\"4.5\" fill=\"" << svg_color(r->method)
            << "\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
      } else {
        svg << "<circle cx=\"" << sx(r->F[0]) << "\" cy=\"" << sy(r->F[1])
            << "\" r=\"2.5\" fill=\"" << svg_color(r->method)
            << "\" fill-opacity=\"0.3\"/>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

GeneratedInstance generate_instance(std::uint64_t seed, int run_index, Index n, Index m,
                                    double delta) {
  if (n < 1 || m < 1) throw std::invalid_argument("generate_instance: n, m must be >= 1");
  if (run_index < 0) throw std::invalid_argument("generate_instance: run_index must be >= 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("generate_instance: delta must be >= 0");

  NormalStream stream(stream_seed(seed, static_cast<std::uint64_t>(run_index)));

  // Draw order is part of the reproducibility contract: per objective M_i then
  // q_i, then the transform B (always drawn, so runs pair across delta values),
  // then x0.
  std::vector<QuadraticObjective> smooth;
  for (Index i = 0; i < m; ++i) {
    const Matrix M = draw_conditioned(stream, n, 1e-8, false, "M");
    const Vector q = stream.vector(n);
    smooth.emplace_back(M * M.transpose(), q);
  }
  const Matrix B = draw_conditioned(stream, n, 1e-6, true, "B");
  const Vector x0 = stream.vector(n);

  // Odd-indexed objectives get the transformed box, even-indexed the plain
  // box; with m = 2 that is exactly h1 = box, h2 = transformed box.
  std::vector<PiecewiseAffine> nonsmooth;
  for (Index i = 0; i < m; ++i) {
    if (i % 2 == 0) {
      nonsmooth.push_back(support_function(box_vertices(n, delta)));
    } else {
      nonsmooth.push_back(support_function(transformed_box_vertices(B, delta)));
    }
  }

  GeneratedInstance out{ProblemInstance(std::move(smooth), std::move(nonsmooth)), x0, B};
  return out;
}

std::vector<FrontierRecord> run_batch(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run_batch: runs must be >= 1");
  if (cfg.deltas.empty()) throw std::invalid_argument("run_batch: no delta values");
  if (cfg.methods.empty()) throw std::invalid_argument("run_batch: no methods");
  for (double delta : cfg.deltas) {
    if (!(delta >= 0.0)) throw std::invalid_argument("run_batch: deltas must be >= 0");
  }

  struct Job {
    double delta;
    UpdateKind method;
    int run_id;
  };
  std::vector<Job> jobs;
  jobs.reserve(cfg.deltas.size() * cfg.methods.size() * static_cast<size_t>(cfg.runs));
  for (double delta : cfg.deltas) {
    for (UpdateKind method : cfg.methods) {
      for (int run = 0; run < cfg.runs; ++run) jobs.push_back(Job{delta, method, run});
    }
  }

  std::vector<FrontierRecord> records(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
      const Job& job = jobs[j];
      FrontierRecord rec;
      rec.run_id = job.run_id;
      rec.delta = job.delta;
      rec.method = job.method;
      rec.line_search = cfg.line_search;

      GeneratedInstance gen = generate_instance(cfg.seed, job.run_id, cfg.n, cfg.m, job.delta);
      if (cfg.fixed_instance && job.run_id != 0) {
        GeneratedInstance base = generate_instance(cfg.seed, 0, cfg.n, cfg.m, job.delta);
        gen.problem = std::move(base.problem);
        gen.transform = std::move(base.transform);
      }

      SolverConfig scfg = cfg.solver;
      scfg.method = job.method;
      scfg.line_search = cfg.line_search;

      const auto t0 = std::chrono::steady_clock::now();
      try {
        const RunResult result = run(gen.problem, gen.x0, scfg);
        rec.status = result.status;
        rec.iterations = result.iterations;
        rec.F = result.F_final;
        rec.x = result.x_final;
      } catch (const std::exception&) {
        rec.status = RunStatus::SubproblemFailure;
        rec.iterations = 0;
        rec.F = eval_F(gen.problem, gen.x0);
        rec.x = gen.x0;
      }
      const auto t1 = std::chrono::steady_clock::now();
      rec.wallclock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      records[j] = std::move(rec);
    }
  };

  unsigned thread_count = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                          : std::thread::hardware_concurrency();
  if (thread_count < 1) thread_count = 1;
  thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(jobs.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  pareto_filter(records);
  return records;
}

void pareto_filter(std::vector<FrontierRecord>& records) {
  std::map<GroupKey, std::vector<size_t>> groups;
  for (size_t i = 0; i < records.size(); ++i) {
    groups[GroupKey{records[i].delta, records[i].method}].push_back(i);
  }
  for (const auto& [key, members] : groups) {
    for (size_t r : members) {
      FrontierRecord& rec = records[r];
      if (!rec.F.allFinite()) {
        rec.nondominated = false;
        continue;
      }
      bool dominated = false;
      for (size_t s : members) {
        if (s == r || !records[s].F.allFinite()) continue;
        const Vector& Fs = records[s].F;
        bool leq = true, strict = false;
        for (Index i = 0; i < rec.F.size(); ++i) {
          if (Fs[i] > rec.F[i]) {
            leq = false;
            break;
          }
          if (Fs[i] < rec.F[i]) strict = true;
        }
        if (leq && strict) {
          dominated = true;
          break;
        }
      }
      rec.nondominated = !dominated;
    }
  }
}

std::string frontier_csv_header(Index n, Index m) {
  std::ostringstream os;
  os << "run_id,delta,method,line_search,status,iterations,wallclock_ms,nondominated";
  for (Index i = 1; i <= m; ++i) os << ",F" << i;
  for (Index i = 1; i <= n; ++i) os << ",x" << i;
  return os.str();
}

std::string frontier_csv_line(const FrontierRecord& r) {
  std::ostringstream os;
  os << r.run_id << ',' << format_double(r.delta) << ',' << to_string(r.method) << ','
     << (r.line_search ? 1 : 0) << ',' << to_string(r.status) << ',' << r.iterations
     << ',' << format_double(r.wallclock_ms) << ',' << (r.nondominated ? 1 : 0);
  for (Index i = 0; i < r.F.size(); ++i) os << ',' << format_double(r.F[i]);
  for (Index i = 0; i < r.x.size(); ++i) os << ',' << format_double(r.x[i]);
  return os.str();
}

std::vector<std::string> write_outputs(const std::vector<FrontierRecord>& records,
                                       const ExperimentConfig& cfg,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + out_dir + ": " +
                             ec.message());
  }
  std::vector<std::string> written;

  const std::string csv_path = (fs::path(out_dir) / "records.csv").string();
  {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
    out << frontier_csv_header(cfg.n, cfg.m) << "\n";
    for (const FrontierRecord& r : records) out << frontier_csv_line(r) << "\n";
    if (!out) throw std::runtime_error("failed writing " + csv_path);
  }
  written.push_back(csv_path);

  // Per-group diagnostics: status tallies, iteration and objective medians,
  // dominance counts. Reported, non-gating.
  const std::string summary_path = (fs::path(out_dir) / "summary.txt").string();
  {
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot open " + summary_path + " for writing");
    std::map<GroupKey, std::vector<const FrontierRecord*>> groups;
    for (const FrontierRecord& r : records) {
      groups[GroupKey{r.delta, r.method}].push_back(&r);
    }
    out << "group summaries (delta, method): runs, stationary, nondominated, "
           "median iterations, median F1+..+Fm\n";
    for (const auto& [key, members] : groups) {
      int stationary = 0, frontier = 0;
      std::vector<double> iters, fsums;
      for (const FrontierRecord* r : members) {
        if (r->status == RunStatus::Stationary) ++stationary;
        if (r->nondominated) ++frontier;
        iters.push_back(static_cast<double>(r->iterations));
        if (r->F.allFinite()) fsums.push_back(r->F.sum());
      }
      out << "delta=" << format_double(key.delta) << " method=" << to_string(key.method)
          << ": runs=" << members.size() << " stationary=" << stationary
          << " nondominated=" << frontier << " median_iterations=" << median(iters)
          << " median_Fsum=" << (fsums.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : median(std::move(fsums)))
          << "\n";
    }

    // Paired-seed iteration comparison between the baseline and the
    // quasi-Newton methods, when both are present.
    std::map<UpdateKind, std::vector<double>> iter_by_method;
    for (const FrontierRecord& r : records) {
      iter_by_method[r.method].push_back(static_cast<double>(r.iterations));
    }
    if (iter_by_method.count(UpdateKind::FROZEN_ZERO) &&
        iter_by_method.count(UpdateKind::BFGS)) {
      out << "median iterations pgm=" << median(iter_by_method[UpdateKind::FROZEN_ZERO])
          << " bfgs=" << median(iter_by_method[UpdateKind::BFGS]) << "\n";
    }
    if (!out) throw std::runtime_error("failed writing " + summary_path);
  }
  written.push_back(summary_path);

  if (cfg.svg && cfg.m == 2) {
    for (double delta : cfg.deltas) {
      std::vector<const FrontierRecord*> group;
      for (const FrontierRecord& r : records) {
        if (r.delta == delta) group.push_back(&r);
      }
      const std::string svg_path =
          (fs::path(out_dir) / ("frontier_delta_" + format_double(delta) + ".svg")).string();
      std::ofstream out(svg_path);
      if (!out) throw std::runtime_error("cannot open " + svg_path + " for writing");
      out << frontier_svg(group);
      if (!out) throw std::runtime_error("failed writing " + svg_path);
      written.push_back(svg_path);
    }
  }
  return written;
}

}  // namespace proxmo
