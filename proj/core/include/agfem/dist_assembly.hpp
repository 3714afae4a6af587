// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_DIST_ASSEMBLY_HPP_
#define AGFEM_DIST_ASSEMBLY_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "agfem/assembly.hpp"
#include "agfem/dist_fe_space.hpp"
#include "agfem/runtime.hpp"
#include "agfem/sparse.hpp"

namespace agfem {

// Rows [owned_begin, owned_end) of the global free-DOF system. Matrix rows
// are local (row - owned_begin), columns are global ids.
struct DistributedSystem {
  int subdomain = 0;
  std::int64_t owned_begin = 0;
  std::int64_t owned_end = 0;
  std::int64_t num_global = 0;
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::int64_t staged_matrix = 0;  // off-owner entries shipped at finalize
  std::int64_t staged_vector = 0;
  bool assembled = false;

  std::int64_t num_owned() const { return owned_end - owned_begin; }
};

// Element of the local cell `local_cell` of subdomain `subdomain`.
using DistElementFn =
    std::function<ElementContribution(int subdomain, std::int64_t local_cell)>;

// Loops over the owned cells of each subdomain, scatters through the local
// constraints, keeps owned rows and ships the rest to their owners.
std::vector<DistributedSystem> assemble_distributed(
    Runtime& rt, std::span<const SubdomainMesh> meshes,
    std::span<const DistStdSpace> spaces,
    std::span<const AgConstraints> constraints, const DistElementFn& element);

// Global system assembled from the owned rows (test and comparison aid).
SerialSystem gather_system(std::span<const DistributedSystem> systems);

// Node keys of the global free DOFs, from their owners.
std::vector<std::uint64_t> global_node_keys(std::span<const DistStdSpace> spaces);

// Off-owned vector entries a subdomain needs for its rows, and the owned
// entries it must send. Both sides are derived locally from the symmetric
// sparsity pattern.
struct MatvecPlan {
  std::vector<int> recv_from;
  std::vector<std::vector<std::int64_t>> recv;  // global ids, ascending
  std::vector<int> send_to;
  std::vector<std::vector<std::int64_t>> send;  // global ids, ascending
};

std::vector<MatvecPlan> build_matvec_plans(std::span<const DistributedSystem> systems);

// y = A x on a distributed layout: x and y hold global vectors, process s
// reads and writes only its owned slice and imports the rest by message.
void distributed_multiply(Runtime& rt, std::span<const DistributedSystem> systems,
                          std::span<const MatvecPlan> plans,
                          std::span<const double> x, std::span<double> y);

// Dot product with per-process partial sums reduced in rank order.
double distributed_dot(Runtime& rt, std::span<const DistributedSystem> systems,
                       std::span<const double> a, std::span<const double> b);

}  // namespace agfem

#endif  // AGFEM_DIST_ASSEMBLY_HPP_
