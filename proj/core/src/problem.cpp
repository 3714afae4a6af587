// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "agfem/errors.hpp"

namespace agfem {

const std::vector<std::string>& geometry_names() {
  static const std::vector<std::string> names{"half-plane", "axis-half-plane", "circle",
                                              "offset-circle", "popcorn"};
  return names;
}

LevelSetPtr make_geometry(const std::string& name, int dim, double shift) {
  LevelSetPtr base;
  if (name == "half-plane") {
    base = std::make_shared<HalfPlane>(Point{0.8, 0.6, 0.0}, 0.7);
  } else if (name == "axis-half-plane") {
    base = std::make_shared<HalfPlane>(Point{1.0, 0.0, 0.0}, 0.5);
  } else if (name == "circle") {
    base = std::make_shared<Sphere>(dim == 3 ? Point{0.5, 0.5, 0.5} : Point{0.5, 0.5, 0.0},
                                    0.3);
  } else if (name == "offset-circle") {
    base = std::make_shared<Sphere>(
        dim == 3 ? Point{0.47, 0.53, 0.5} : Point{0.47, 0.53, 0.0}, 0.33);
  } else if (name == "popcorn") {
    if (dim != 3) throw ContractViolation("the popcorn geometry is three-dimensional");
    base = std::make_shared<Transformed>(std::make_shared<PopcornFlake>(),
                                         Point{0.5, 0.5, 0.5}, 0.5);
  } else {
    throw ContractViolation("unknown geometry '" + name + "'");
  }
  if (shift == 0.0) return base;
  return std::make_shared<Transformed>(base, Point{shift, 0.0, 0.0}, 1.0);
}

ManufacturedSolution manufactured_solution(const std::string& name, int dim) {
  ManufacturedSolution m;
  m.name = name;
  if (name == "linear") {
    m.in_span = true;
    m.u = [dim](const Point& x) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) s += x[a];
      return s;
    };
    m.grad = [dim](const Point&) {
      Point g{0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) g[a] = 1.0;
      return g;
    };
    m.f = [](const Point&) { return 0.0; };
  } else if (name == "sine") {
    constexpr double pi = std::numbers::pi;
    m.u = [dim](const Point& x) {
      double p = 1.0;
      for (int a = 0; a < dim; ++a) p *= std::sin(pi * x[a]);
      return p;
    };
    m.grad = [dim](const Point& x) {
      Point g{0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) {
        double p = pi * std::cos(pi * x[a]);
        for (int b = 0; b < dim; ++b) {
          if (b != a) p *= std::sin(pi * x[b]);
        }
        g[a] = p;
      }
      return g;
    };
    m.f = [dim](const Point& x) {
      double p = dim * pi * pi;
      for (int a = 0; a < dim; ++a) p *= std::sin(pi * x[a]);
      return p;
    };
  } else {
    throw ContractViolation("unknown manufactured solution '" + name + "'");
  }
  return m;
}

Discretization discretize(const ProblemConfig& config) {
  if (config.order < 1) throw ContractViolation("order must be at least 1");
  if (!(config.beta > 0.0)) throw ContractViolation("beta must be positive");
  Discretization d(BackgroundGrid(BoundingBox::unit(), config.level, config.dim));
  d.config = config;
  d.ls = make_geometry(config.geometry, config.dim, config.shift);
  d.solution = manufactured_solution(config.solution, config.dim);
  d.cls = classify_cells(d.grid, *d.ls);
  if (d.cls.interior_cells.empty()) {
    throw NumericalError("geometry has no interior cell at level " +
                         std::to_string(config.level));
  }
  d.mesh = build_active_mesh(d.grid, *d.ls, d.cls);
  const int qorder = 2 * config.order + 2;
  d.quadrature.resize(d.cls.num_active());
  d.tau.assign(d.cls.num_active(), nitsche_tau_agg(d.h(), config.beta));
  const LagrangeBasis basis(config.dim, config.order);
  for (std::int64_t k = 0; k < d.cls.num_active(); ++k) {
    const Lattice c = d.grid.lattice(d.cls.active_cells[k]);
    d.quadrature[k] = cut_quadrature(d.grid, *d.ls, c, qorder, d.cls.tolerance);
    if (config.space == SpaceKind::std_space && !d.cls.is_interior(k)) {
      const StdPenalty p = nitsche_tau_std(basis, d.grid.cell_box(c), d.quadrature[k],
                                           config.beta, d.h());
      if (p.unbounded) ++d.unbounded_tau;
      if (!std::isfinite(p.tau)) {
        throw NumericalError("unbounded Nitsche penalty on cut cell " + std::to_string(k));
      }
      d.tau[k] = p.tau;
    }
  }
  d.space = build_std_space(d.grid, d.cls, config.order);
  if (config.space == SpaceKind::agg) {
    d.roots = aggregate_serial(d.mesh);
    d.dofs = classify_dofs(d.space, d.cls, &d.roots);
    d.constraints = build_constraints_serial(d.space, d.dofs, d.roots);
  } else {
    d.dofs = classify_dofs(d.space, d.cls);
  }
  return d;
}

ElementContribution element(const Discretization& d, std::int64_t cell) {
  const LagrangeBasis basis(d.config.dim, d.config.order);
  const BoundingBox box = d.grid.cell_box(d.grid.lattice(d.cls.active_cells[cell]));
  return element_poisson_nitsche(basis, box, d.quadrature[cell], d.tau[cell],
                                 d.solution.f, d.solution.u);
}

SerialSystem assemble(const Discretization& d) {
  const auto fn = [&d](std::int64_t k) { return element(d, k); };
  if (d.config.space == SpaceKind::agg) {
    return assemble_serial(d.space, d.dofs, d.constraints, d.cls.num_active(), fn);
  }
  return assemble_serial_std(d.space, d.cls.num_active(), fn);
}

std::vector<double> full_nodal(const Discretization& d, std::span<const double> x) {
  if (d.config.space == SpaceKind::agg) {
    return prolongate(d.space, d.dofs, d.constraints, x);
  }
  return {x.begin(), x.end()};
}

ErrorNorms solution_errors(const Discretization& d, std::span<const double> x) {
  const std::vector<double> nodal = full_nodal(d, x);
  return error_norms(d.grid, d.cls, d.space, nodal, d.quadrature, d.solution.u,
                     d.solution.grad);
}

std::vector<double> exact_unknowns(const Discretization& d) {
  std::vector<double> x;
  if (d.config.space == SpaceKind::agg) {
    for (std::int64_t dof : d.dofs.interior_dofs) x.push_back(d.solution.u(d.space.coords[dof]));
  } else {
    for (const Point& p : d.space.coords) x.push_back(d.solution.u(p));
  }
  return x;
}

DistributedRun begin_distributed(const Discretization& d, Runtime& rt,
                                 const Partition& partition,
                                 const ParallelAggregationOptions& options) {
  if (d.config.space != SpaceKind::agg) {
    throw ContractViolation("distributed runs support the aggregated space only");
  }
  if (partition.num_parts != rt.size()) {
    throw ContractViolation("partition and runtime disagree on the process count");
  }
  DistributedRun run;
  run.partition = partition;
  run.meshes = build_subdomain_meshes(d.grid, d.cls, d.mesh, partition);
  std::vector<std::vector<int>> graph;
  for (const SubdomainMesh& m : run.meshes) graph.push_back(m.neighbors);
  rt.set_neighbors(graph);

  run.aggregation = aggregate_parallel(rt, run.meshes, options);
  return run;
}

void finish_distributed(const Discretization& d, Runtime& rt, DistributedRun& run) {
  run.plans = build_import_plans(rt, run.meshes, run.aggregation.maps);
  run.spaces = number_dofs_distributed(rt, d.grid, run.meshes, d.config.order);
  const int npc = run.spaces.front().nodes_per_cell;
  run.buffers = import_root_data(rt, run.meshes, run.plans, npc,
                                 [&](int s, std::int64_t l) {
                                   return cell_node_data(d.grid, run.spaces[s],
                                                         run.meshes[s], l);
                                 });
  for (int s = 0; s < rt.size(); ++s) {
    run.constraints.push_back(build_constraints_distributed(
        d.grid, run.spaces[s], run.meshes[s], run.aggregation.maps[s], run.plans[s],
        run.buffers[s]));
  }
  run.systems = assemble_distributed(
      rt, run.meshes, run.spaces, run.constraints,
      [&](int s, std::int64_t l) { return element(d, run.meshes[s].global[l]); });
  run.matvec = build_matvec_plans(run.systems);
}

DistributedRun run_distributed(const Discretization& d, Runtime& rt,
                               const Partition& partition,
                               const ParallelAggregationOptions& options) {
  DistributedRun run = begin_distributed(d, rt, partition, options);
  finish_distributed(d, rt, run);
  return run;
}

std::vector<std::int64_t> serial_to_global(const Discretization& d,
                                           std::span<const DistStdSpace> spaces) {
  const std::vector<std::uint64_t> keys = global_node_keys(spaces);
  std::unordered_map<std::uint64_t, std::int64_t> global_of;
  for (std::size_t g = 0; g < keys.size(); ++g) {
    global_of.emplace(keys[g], static_cast<std::int64_t>(g));
  }
  std::vector<std::int64_t> out(d.dofs.num_interior(), -1);
  for (std::int64_t i = 0; i < d.dofs.num_interior(); ++i) {
    const auto it = global_of.find(d.space.node_key[d.dofs.interior_dofs[i]]);
    if (it != global_of.end()) out[i] = it->second;
  }
  return out;
}

double system_checksum(const SerialSystem& s) {
  double c = 0.0;
  for (double v : s.matrix.values()) c += std::abs(v);
  for (double v : s.rhs) c += std::abs(v);
  return c;
}

}  // namespace agfem
