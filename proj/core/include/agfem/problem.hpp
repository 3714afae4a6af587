// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_PROBLEM_HPP_
#define AGFEM_PROBLEM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agfem/aggregation.hpp"
#include "agfem/assembly.hpp"
#include "agfem/classification.hpp"
#include "agfem/dist_assembly.hpp"
#include "agfem/dist_fe_space.hpp"
#include "agfem/fe_space.hpp"
#include "agfem/level_set.hpp"
#include "agfem/parallel_aggregation.hpp"
#include "agfem/partition.hpp"
#include "agfem/quadrature.hpp"
#include "agfem/solver.hpp"

namespace agfem {

// Named geometries on the unit box:
//   half-plane       0.8 x + 0.6 y < 0.7
//   axis-half-plane  x < 0.5
//   circle           |x - (0.5, 0.5)| < 0.3
//   offset-circle    |x - (0.47, 0.53)| < 0.33
//   popcorn          popcorn flake scaled by 0.5 around the box center (3D)
// `shift` translates the domain along +x.
LevelSetPtr make_geometry(const std::string& name, int dim, double shift = 0.0);
const std::vector<std::string>& geometry_names();

struct ManufacturedSolution {
  std::string name;
  ScalarField u;
  VectorField grad;
  ScalarField f;  // -lap u
  bool in_span = false;  // reproduced exactly by Q1
};

// "linear": sum of the coordinates; "sine": product of sin(pi x_i).
ManufacturedSolution manufactured_solution(const std::string& name, int dim);

enum class SpaceKind { agg, std_space };

struct ProblemConfig {
  std::string geometry = "circle";
  int dim = 2;
  int level = 4;
  int order = 1;
  SpaceKind space = SpaceKind::agg;
  double beta = 10.0;
  double shift = 0.0;
  std::string solution = "linear";
};

// Serial discretization: everything up to the constraints, with one cut
// quadrature of order 2q + 2 per active cell.
struct Discretization {
  explicit Discretization(const BackgroundGrid& g) : grid(g) {}

  BackgroundGrid grid;
  ProblemConfig config;
  LevelSetPtr ls;
  CellClassification cls;
  ActiveMesh mesh;
  RootMap roots;
  std::vector<CutQuadrature> quadrature;  // by active id
  std::vector<double> tau;                // by active id
  std::int64_t unbounded_tau = 0;         // cut cells with singular volume form
  StdSpace space;
  DofClassification dofs;
  AgConstraints constraints;
  ManufacturedSolution solution;

  double h() const { return grid.min_cell_size(); }
  std::int64_t num_unknowns() const {
    return config.space == SpaceKind::agg ? dofs.num_interior() : space.num_dofs;
  }
};

Discretization discretize(const ProblemConfig& config);

ElementContribution element(const Discretization& d, std::int64_t cell);
SerialSystem assemble(const Discretization& d);

// Nodal values on every DOF of the standard space.
std::vector<double> full_nodal(const Discretization& d, std::span<const double> x);
ErrorNorms solution_errors(const Discretization& d, std::span<const double> x);

// Exact nodal values on the unknowns (interior DOFs for agg).
std::vector<double> exact_unknowns(const Discretization& d);

// Distributed counterpart of the aggregated discretization.
struct DistributedRun {
  Partition partition;
  std::vector<SubdomainMesh> meshes;
  DistAggregation aggregation;
  std::vector<RootImportPlan> plans;
  std::vector<DistStdSpace> spaces;
  std::vector<RootDataBuffer> buffers;
  std::vector<AgConstraints> constraints;
  std::vector<DistributedSystem> systems;
  std::vector<MatvecPlan> matvec;
};

// Declares the neighbor graph on `rt` and runs aggregation, import plans,
// numbering, root import, constraints and assembly.
DistributedRun run_distributed(const Discretization& d, Runtime& rt,
                               const Partition& partition,
                               const ParallelAggregationOptions& options = {});

// The same in two stages: subdomain meshes and aggregation, then the rest.
DistributedRun begin_distributed(const Discretization& d, Runtime& rt,
                                 const Partition& partition,
                                 const ParallelAggregationOptions& options = {});
void finish_distributed(const Discretization& d, Runtime& rt, DistributedRun& run);

// Global id of every serial unknown, matched by node position.
std::vector<std::int64_t> serial_to_global(const Discretization& d,
                                           std::span<const DistStdSpace> spaces);

// Sum of absolute matrix and vector entries.
double system_checksum(const SerialSystem& s);

}  // namespace agfem

#endif  // AGFEM_PROBLEM_HPP_
