// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "experiments.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "svg.hpp"

namespace agfem::tools {
namespace {

namespace fs = std::filesystem;

std::string num(double v) { return fmt::format("{:.12e}", v); }

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out) / name).string();
}

void prepare_out(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out + "'");
}

void append_timings(const ExperimentConfig& cfg, const std::string& command, int level,
                    int procs, const PhaseTimer& timer) {
  for (const auto& [phase, seconds] : timer.phases()) {
    append_csv(out_path(cfg, "timings.csv"), "command,level,procs,threads,phase,seconds",
               fmt::format("{},{},{},{},{},{:.6f}", command, level, procs, cfg.threads,
                           phase, seconds));
  }
}

SolverOptions solver_options(const ExperimentConfig& cfg, int lanczos_steps) {
  SolverOptions o;
  o.rtol = cfg.rtol;
  o.maxit = cfg.maxit;
  o.seed = cfg.seed;
  o.lanczos_steps = lanczos_steps;
  return o;
}

ExecutionPolicy policy_of(const ExperimentConfig& cfg) {
  return {cfg.threads, cfg.seed};
}

std::vector<double> global_rhs(std::span<const DistributedSystem> systems) {
  std::vector<double> b(systems.front().num_global, 0.0);
  for (const DistributedSystem& s : systems) {
    std::copy(s.rhs.begin(), s.rhs.end(), b.begin() + s.owned_begin);
  }
  return b;
}

void dump_aggregates(const ExperimentConfig& cfg, const Discretization& d) {
  std::vector<std::string> rows;
  for (std::int64_t k = 0; k < d.cls.num_active(); ++k) {
    const Lattice c = d.mesh.lattice[k];
    rows.push_back(fmt::format("{},{},{},{},{},{},{},{}", k, d.cls.active_cells[k], c[0], c[1],
                               c[2], d.cls.is_interior(k) ? "interior" : "cut",
                               d.roots.root[k], d.roots.next[k]));
  }
  write_csv(out_path(cfg, "aggregates.csv"), "cell,morton,i,j,k,kind,root,next", rows);
}

void dump_constraints(const ExperimentConfig& cfg, const Discretization& d) {
  std::vector<std::string> rows;
  for (std::int64_t r = 0; r < d.constraints.size(); ++r) {
    const std::int64_t dof = d.constraints.constrained[r];
    const auto m = d.constraints.masters_of(r);
    const auto c = d.constraints.coefficients_of(r);
    for (std::size_t i = 0; i < m.size(); ++i) {
      rows.push_back(fmt::format("{},{},{}", dof, d.dofs.interior_dofs[m[i]], num(c[i])));
    }
  }
  write_csv(out_path(cfg, "constraints.csv"), "dof,master_dof,coefficient", rows);
}

void dump_matrix(const ExperimentConfig& cfg, const SerialSystem& s) {
  std::ofstream f(out_path(cfg, "matrix.mtx"), std::ios::binary);
  if (!f) throw ConfigError("cannot write the matrix dump");
  s.matrix.write_coordinate(f);
}

LinePlot log_plot(std::string title, std::string x, std::string y) {
  LinePlot p;
  p.title = std::move(title);
  p.x_label = std::move(x);
  p.y_label = std::move(y);
  return p;
}

}  // namespace

const std::string& run_record_header() {
  static const std::string h =
      "schema_version,geometry,dim,level,order,space,beta,rtol,maxit,procs,weight,seed,"
      "active_cells,cut_cells,unknowns,aggregation_rounds,max_aggregate_size,checksum,"
      "iterations,converged,kappa,rel_l2,rel_h1";
  return h;
}

std::string run_record_row(const RunRecord& r) {
  const ExperimentConfig& c = r.config;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                     kSchemaVersion, c.geometry, c.dim, r.level, c.order,
                     space_name(c.space), num(c.beta), num(c.rtol), c.maxit, c.procs,
                     num(c.weight), c.seed, r.active_cells, r.cut_cells, r.unknowns,
                     r.aggregation_rounds, r.max_aggregate_size, num(r.checksum),
                     r.iterations, r.converged ? 1 : 0, num(r.kappa), num(r.rel_l2),
                     num(r.rel_h1));
}

void append_csv(const std::string& path, const std::string& header,
                const std::string& row) {
  bool fresh = true;
  {
    std::ifstream in(path);
    std::string first;
    if (in && std::getline(in, first)) {
      if (first != header) {
        throw ConfigError("'" + path + "' has a different schema; use a new output directory");
      }
      fresh = false;
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  if (fresh) f << header << "\n";
  f << row << "\n";
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << header << "\n";
  for (const std::string& r : rows) f << r << "\n";
}

SolveResult solve_problem(const ExperimentConfig& cfg, const Discretization& d,
                          PhaseTimer& timer) {
  if (cfg.procs > 1 && d.config.space != SpaceKind::agg) {
    throw ConfigError("the standard space runs on a single process");
  }
  SolveResult res;
  RunRecord& rec = res.record;
  rec.config = cfg;
  rec.level = d.config.level;
  rec.active_cells = d.cls.num_active();
  rec.cut_cells = static_cast<std::int64_t>(d.cls.cut_cells.size());
  rec.unknowns = d.num_unknowns();
  const SolverOptions options = solver_options(cfg, 200);
  if (cfg.procs == 1) {
    if (d.config.space == SpaceKind::agg) {
      rec.aggregation_rounds = d.roots.rounds;
    }
    res.system = timer.run("assemble", [&] { return assemble(d); });
    res.solution = timer.run("solve", [&] {
      return pcg_jacobi(res.system.matrix, res.system.rhs, options, res.report);
    });
  } else {
    Runtime rt(cfg.procs, policy_of(cfg));
    const Partition part =
        timer.run("partition", [&] { return partition_weighted_sfc(d.cls, cfg.weight, cfg.procs); });
    DistributedRun run =
        timer.run("aggregate", [&] { return begin_distributed(d, rt, part); });
    rec.aggregation_rounds = run.aggregation.rounds;
    timer.run("assemble", [&] { finish_distributed(d, rt, run); });
    const std::vector<std::int64_t> perm = serial_to_global(d, run.spaces);
    const std::vector<double> b = global_rhs(run.systems);
    const std::vector<double> xg = timer.run("solve", [&] {
      return pcg_jacobi(distributed_operator(rt, run.systems, run.matvec), b, options,
                        res.report);
    });
    res.solution.resize(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] < 0) {
        throw PhaseError("solve", "serial unknown without a distributed counterpart",
                         kExitNumerical);
      }
      res.solution[i] = xg[perm[i]];
    }
    res.system = gather_system(run.systems);
  }
  if (d.config.space == SpaceKind::agg) {
    rec.max_aggregate_size =
        static_cast<std::int64_t>(aggregates(d.roots, d.mesh).max_size);
  }
  rec.checksum = system_checksum(res.system);
  rec.iterations = res.report.iterations;
  rec.converged = res.report.converged;
  rec.kappa = res.report.kappa;
  const ErrorNorms e = timer.run("norms", [&] { return solution_errors(d, res.solution); });
  rec.rel_l2 = e.l2;
  rec.rel_h1 = e.h1;
  return res;
}

ParallelCheckResult parallel_check(const Discretization& d, const SerialSystem& serial,
                                   const SolveReport& serial_report, int procs,
                                   double weight, const ExecutionPolicy& policy,
                                   const SolverOptions& options,
                                   const ParallelAggregationOptions& hooks) {
  ParallelCheckResult r;
  r.procs = procs;
  r.iterations_serial = serial_report.iterations;
  Runtime rt(procs, policy);
  const Partition part = partition_weighted_sfc(d.cls, weight, procs);
  DistributedRun run;
  try {
    run = begin_distributed(d, rt, part, hooks);
  } catch (const Error& e) {
    r.first_mismatch = std::string("parallel aggregation failed: ") + e.what();
    return r;
  }

  for (int s = 0; s < procs; ++s) {
    const SubdomainMesh& mesh = run.meshes[s];
    const DistRootMap& map = run.aggregation.maps[s];
    for (std::int64_t l = 0; l < mesh.size(); ++l) {
      const std::int64_t k = mesh.global[l];
      if (map.root[l] == d.roots.root[k]) continue;
      r.mismatched_cells.push_back(k);
      if (r.first_mismatch.empty()) {
        r.first_mismatch = fmt::format(
            "cell {} on subdomain {} ({}): serial root {}, parallel root {}", k, s,
            mesh.is_local(l) ? "local" : "ghost", d.roots.root[k], map.root[l]);
      }
    }
  }
  std::sort(r.mismatched_cells.begin(), r.mismatched_cells.end());
  r.mismatched_cells.erase(std::unique(r.mismatched_cells.begin(), r.mismatched_cells.end()),
                           r.mismatched_cells.end());
  if (!r.mismatched_cells.empty()) return r;
  r.roots_equal = true;

  try {
    finish_distributed(d, rt, run);
  } catch (const Error& e) {
    r.first_mismatch = std::string("distributed setup failed: ") + e.what();
    return r;
  }
  const std::vector<std::int64_t> perm = serial_to_global(d, run.spaces);
  if (std::find(perm.begin(), perm.end(), -1) != perm.end() ||
      static_cast<std::int64_t>(perm.size()) != run.systems.front().num_global) {
    r.first_mismatch = "free DOF sets differ";
    return r;
  }

  std::unordered_map<std::uint64_t, std::int64_t> dof_of_key;
  for (std::int64_t i = 0; i < d.space.num_dofs; ++i) dof_of_key.emplace(d.space.node_key[i], i);
  r.constraints_equal = true;
  for (int s = 0; s < procs && r.constraints_equal; ++s) {
    const AgConstraints& c = run.constraints[s];
    for (std::int64_t row = 0; row < c.size(); ++row) {
      const std::int64_t j = c.constrained[row];
      const std::int64_t dof = dof_of_key.at(run.spaces[s].node_key[j]);
      const std::int64_t sr = d.constraints.row_of[dof];
      std::vector<std::pair<std::int64_t, double>> a;
      std::vector<std::pair<std::int64_t, double>> b;
      if (sr >= 0) {
        const auto m = d.constraints.masters_of(sr);
        const auto w = d.constraints.coefficients_of(sr);
        for (std::size_t i = 0; i < m.size(); ++i) a.emplace_back(perm[m[i]], w[i]);
      }
      const auto m = c.masters_of(row);
      const auto w = c.coefficients_of(row);
      for (std::size_t i = 0; i < m.size(); ++i) b.emplace_back(m[i], w[i]);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      bool same = a.size() == b.size();
      for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a[i].first == b[i].first && std::abs(a[i].second - b[i].second) <= 1e-12;
      }
      if (!same) {
        r.constraints_equal = false;
        r.first_mismatch = fmt::format("constraint of DOF {} (subdomain {}, local {})", dof, s, j);
        break;
      }
    }
  }
  if (!r.constraints_equal) return r;

  const SerialSystem g = gather_system(run.systems);
  double diff = 0.0;
  std::string where;
  const auto& ptr = serial.matrix.row_ptr();
  for (std::int64_t i = 0; i < serial.matrix.rows(); ++i) {
    for (std::int64_t k = ptr[i]; k < ptr[i + 1]; ++k) {
      const std::int64_t j = serial.matrix.col_idx()[k];
      const double e = std::abs(serial.matrix.values()[k] - g.matrix.at(perm[i], perm[j]));
      if (e > diff) {
        diff = e;
        where = fmt::format("matrix entry ({}, {})", i, j);
      }
    }
    const double e = std::abs(serial.rhs[i] - g.rhs[perm[i]]);
    if (e > diff) {
      diff = e;
      where = fmt::format("right-hand side entry {}", i);
    }
  }
  r.system_diff = diff;
  r.system_equal = diff <= 1e-12 && serial.matrix.nnz() == g.matrix.nnz();
  if (!r.system_equal) {
    r.first_mismatch = serial.matrix.nnz() != g.matrix.nnz()
                           ? fmt::format("sparsity differs: {} vs {} entries",
                                         serial.matrix.nnz(), g.matrix.nnz())
                           : where;
    return r;
  }

  SolveReport report;
  SolverOptions o = options;
  o.lanczos_steps = 0;
  pcg_jacobi(distributed_operator(rt, run.systems, run.matvec), global_rhs(run.systems), o,
             report);
  r.iterations_parallel = report.iterations;
  double h = 0.0;
  const std::size_t n = std::min(report.residuals.size(), serial_report.residuals.size());
  for (std::size_t i = 0; i < n; ++i) {
    h = std::max(h, std::abs(report.residuals[i] - serial_report.residuals[i]));
  }
  r.history_diff = h;
  r.history_equal = report.iterations == serial_report.iterations && h <= 1e-10;
  if (!r.history_equal) {
    r.first_mismatch = fmt::format("solver history: {} vs {} iterations, max difference {:.3e}",
                                   serial_report.iterations, report.iterations, h);
  }
  return r;
}

BalanceRow weight_balance(const CellClassification& cls, double weight, int procs) {
  const Partition p = partition_weighted_sfc(cls, weight, procs);
  std::vector<std::int64_t> active(procs, 0);
  std::vector<std::int64_t> total(procs, 0);
  for (std::size_t key = 0; key < p.owner.size(); ++key) {
    ++total[p.owner[key]];
    if (cls.kind[key] != CellKind::exterior) ++active[p.owner[key]];
  }
  BalanceRow row;
  row.weight = weight;
  row.procs = procs;
  row.max_active = *std::max_element(active.begin(), active.end());
  row.min_active = *std::min_element(active.begin(), active.end());
  row.max_total = *std::max_element(total.begin(), total.end());
  row.min_total = *std::min_element(total.begin(), total.end());
  return row;
}

double fitted_order(std::span<const double> h, std::span<const double> error) {
  const std::size_t n = h.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

int cmd_solve(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  prepare_out(cfg);
  PhaseTimer timer;
  const Discretization d =
      timer.run("discretize", [&] { return discretize(problem_config(cfg, cfg.level)); });
  const SolveResult res = solve_problem(cfg, d, timer);
  append_csv(out_path(cfg, "solve.csv"), run_record_header(), run_record_row(res.record));
  for (const std::string& what : cfg.dump) {
    if (what == "aggregates" && cfg.space == SpaceKind::agg) dump_aggregates(cfg, d);
    if (what == "constraints" && cfg.space == SpaceKind::agg) dump_constraints(cfg, d);
    if (what == "matrix") dump_matrix(cfg, res.system);
  }
  append_timings(cfg, "solve", cfg.level, cfg.procs, timer);
  const RunRecord& r = res.record;
  fmt::print(log,
             "solve: {} level {} {} P={}: {} unknowns, {} iterations ({}), kappa {:.3e}, "
             "rel L2 {:.3e}, rel H1 {:.3e}\n",
             cfg.geometry, cfg.level, space_name(cfg.space), cfg.procs, r.unknowns,
             r.iterations, r.converged ? "converged" : "not converged", r.kappa, r.rel_l2,
             r.rel_h1);
  return r.converged ? kExitOk : kExitNumerical;
}

int cmd_cut_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  prepare_out(cfg);
  const double h = BackgroundGrid(BoundingBox::unit(), cfg.level, cfg.dim).min_cell_size();
  std::vector<std::string> rows;
  Series kagg{"kappa agg", {}, {}};
  Series kstd{"kappa std", {}, {}};
  PhaseTimer timer;
  for (double f : cfg.offsets) {
    struct Outcome {
      std::int64_t unknowns = 0;
      double kappa = std::numeric_limits<double>::infinity();
      int iterations = 0;
      bool converged = false;
      std::int64_t unbounded = 0;
      std::string method = "none";
    };
    auto run = [&](SpaceKind kind) {
      Outcome o;
      ProblemConfig p = problem_config(cfg, cfg.level);
      p.space = kind;
      p.shift = f * h;
      try {
        const Discretization d = discretize(p);
        o.unknowns = d.num_unknowns();
        o.unbounded = d.unbounded_tau;
        const SerialSystem s = assemble(d);
        SolveReport rep;
        pcg_jacobi(s.matrix, s.rhs, solver_options(cfg, 0), rep);
        o.iterations = rep.iterations;
        o.converged = rep.converged;
        const bool dense = s.matrix.rows() <= kDenseLimit;
        o.kappa = condition_estimate(s.matrix,
                                     dense ? ConditionMethod::dense : ConditionMethod::lanczos,
                                     300, cfg.seed);
        o.method = dense ? "dense" : "lanczos";
      } catch (const NumericalError& e) {
        fmt::print(log, "cut-sweep: offset {:.1e} {}: {}\n", f, space_name(kind), e.what());
      }
      return o;
    };
    const Outcome a = timer.run("agg", [&] { return run(SpaceKind::agg); });
    const Outcome s = timer.run("std", [&] { return run(SpaceKind::std_space); });
    rows.push_back(fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", num(f), num(f * h),
                               a.unknowns, s.unknowns, num(a.kappa), num(s.kappa),
                               a.iterations, s.iterations, a.converged ? 1 : 0,
                               s.converged ? 1 : 0, s.unbounded, a.method, s.method));
    kagg.x.push_back(f);
    kagg.y.push_back(a.kappa);
    kstd.x.push_back(f);
    kstd.y.push_back(s.kappa);
    fmt::print(log, "cut-sweep: offset {:.1e} h: kappa agg {:.3e}, std {:.3e}\n", f, a.kappa,
               s.kappa);
  }
  write_csv(out_path(cfg, "cut_sweep.csv"),
            "offset,shift,unknowns_agg,unknowns_std,kappa_agg,kappa_std,iterations_agg,"
            "iterations_std,converged_agg,converged_std,unbounded_tau_cells,kappa_method_agg,"
            "kappa_method_std",
            rows);
  LinePlot plot = log_plot("Condition number against cut offset", "offset / h", "kappa");
  plot.series = {kagg, kstd};
  write_text_file(out_path(cfg, "cut_sweep.svg"), render_svg(plot));
  append_timings(cfg, "cut-sweep", cfg.level, 1, timer);
  return kExitOk;
}

int cmd_parallel_check(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.space != SpaceKind::agg) {
    throw ConfigError("parallel-check compares aggregated spaces; use space = agg");
  }
  prepare_out(cfg);
  PhaseTimer timer;
  const Discretization d =
      timer.run("discretize", [&] { return discretize(problem_config(cfg, cfg.level)); });
  const SerialSystem serial = timer.run("assemble", [&] { return assemble(d); });
  SolveReport serial_report;
  timer.run("solve", [&] {
    pcg_jacobi(serial.matrix, serial.rhs, solver_options(cfg, 0), serial_report);
  });
  std::vector<std::string> rows;
  bool all = true;
  for (int p : cfg.procs_list) {
    const ParallelCheckResult r = timer.run(fmt::format("check P={}", p), [&] {
      return parallel_check(d, serial, serial_report, p, cfg.weight, policy_of(cfg),
                            solver_options(cfg, 0));
    });
    all = all && r.passed();
    std::string mismatch = r.first_mismatch;
    std::replace(mismatch.begin(), mismatch.end(), '"', '\'');
    rows.push_back(fmt::format("{},{},{},{},{},{},{},{},{},\"{}\"", p, r.roots_equal ? 1 : 0,
                               r.constraints_equal ? 1 : 0, r.system_equal ? 1 : 0,
                               num(r.system_diff), num(r.history_diff), r.iterations_serial,
                               r.iterations_parallel, r.passed() ? "pass" : "fail", mismatch));
    fmt::print(log, "parallel-check: P={} {}{}\n", p, r.passed() ? "pass" : "FAIL",
               r.passed() ? "" : " at " + r.first_mismatch);
  }
  write_csv(out_path(cfg, "parallel_check.csv"),
            "procs,roots_equal,constraints_equal,system_equal,system_max_diff,"
            "history_max_diff,iterations_serial,iterations_parallel,status,first_mismatch",
            rows);
  append_timings(cfg, "parallel-check", cfg.level, 0, timer);
  return all ? kExitOk : kExitEquivalence;
}

int cmd_convergence(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  prepare_out(cfg);
  std::vector<std::string> rows;
  std::vector<double> hs, l2, h1;
  bool converged = true;
  for (int level : cfg.levels) {
    PhaseTimer timer;
    const Discretization d =
        timer.run("discretize", [&] { return discretize(problem_config(cfg, level)); });
    const SolveResult res = solve_problem(cfg, d, timer);
    const RunRecord& r = res.record;
    converged = converged && r.converged;
    hs.push_back(d.h());
    l2.push_back(r.rel_l2);
    h1.push_back(r.rel_h1);
    rows.push_back(fmt::format("{},{},{},{},{},{},{}", level, num(d.h()), r.unknowns,
                               r.iterations, r.converged ? 1 : 0, num(r.rel_l2),
                               num(r.rel_h1)));
    append_timings(cfg, "convergence", level, cfg.procs, timer);
    fmt::print(log, "convergence: level {} rel L2 {:.3e} rel H1 {:.3e}\n", level, r.rel_l2,
               r.rel_h1);
  }
  write_csv(out_path(cfg, "convergence.csv"),
            "level,h,unknowns,iterations,converged,rel_l2,rel_h1", rows);
  std::string flag;
  std::string o2, o1;
  if (hs.size() < 2) {
    flag = "single-level";
  } else {
    o2 = num(fitted_order(hs, l2));
    o1 = num(fitted_order(hs, h1));
    if (manufactured_solution(cfg.solution, cfg.dim).in_span) flag = "in-span";
    fmt::print(log, "convergence: fitted orders L2 {} H1 {}{}\n", o2, o1,
               flag.empty() ? "" : " (in-span solution, slopes not meaningful)");
  }
  write_csv(out_path(cfg, "convergence_orders.csv"), "solution,levels,l2_order,h1_order,flag",
            {fmt::format("{},{},{},{},{}", cfg.solution, hs.size(), o2, o1, flag)});
  LinePlot plot = log_plot("Relative error against cell size", "h", "relative error");
  plot.series = {{"L2", hs, l2}, {"H1 seminorm", hs, h1}};
  write_text_file(out_path(cfg, "convergence.svg"), render_svg(plot));
  return converged ? kExitOk : kExitNumerical;
}

int cmd_weight_study(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.procs < 2) throw ConfigError("weight-study needs procs >= 2");
  prepare_out(cfg);
  const BackgroundGrid grid(BoundingBox::unit(), cfg.level, cfg.dim);
  const LevelSetPtr ls = make_geometry(cfg.geometry, cfg.dim);
  PhaseTimer timer;
  const CellClassification cls = timer.run("classify", [&] { return classify_cells(grid, *ls); });
  std::vector<std::string> rows;
  Series act{"active max/min", {}, {}};
  Series tot{"total max/min", {}, {}};
  for (double w : cfg.weights) {
    const BalanceRow b = timer.run("partition", [&] { return weight_balance(cls, w, cfg.procs); });
    const double ra = static_cast<double>(b.max_active) / std::max<std::int64_t>(b.min_active, 1);
    const double rt = static_cast<double>(b.max_total) / std::max<std::int64_t>(b.min_total, 1);
    rows.push_back(fmt::format("{},{},{},{},{},{},{},{}", num(w), b.procs, b.max_active,
                               b.min_active, b.max_total, b.min_total, num(ra), num(rt)));
    act.x.push_back(w);
    act.y.push_back(ra);
    tot.x.push_back(w);
    tot.y.push_back(rt);
    fmt::print(log, "weight-study: w={} active {}..{}, total {}..{}\n", w, b.min_active,
               b.max_active, b.min_total, b.max_total);
  }
  write_csv(out_path(cfg, "weight_study.csv"),
            "weight,procs,max_active,min_active,max_total,min_total,active_ratio,total_ratio",
            rows);
  LinePlot plot = log_plot("Partition balance against active-cell weight", "weight w",
                           "max / min cells per subdomain");
  plot.log_y = false;
  plot.series = {act, tot};
  write_text_file(out_path(cfg, "weight_study.svg"), render_svg(plot));
  append_timings(cfg, "weight-study", cfg.level, cfg.procs, timer);
  return kExitOk;
}

}  // namespace agfem::tools
