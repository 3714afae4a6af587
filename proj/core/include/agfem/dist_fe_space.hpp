// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_DIST_FE_SPACE_HPP_
#define AGFEM_DIST_FE_SPACE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "agfem/fe_space.hpp"
#include "agfem/parallel_aggregation.hpp"
#include "agfem/partition.hpp"
#include "agfem/runtime.hpp"

namespace agfem {

// Space data of one subdomain. Local DOF ids j enumerate the nodes of the
// owned cells; free DOFs also carry a global id.
struct DistStdSpace {
  int subdomain = 0;
  int dim = 2;
  int order = 1;
  int nodes_per_cell = 4;
  std::vector<std::int64_t> cell_local_dofs;   // owned cell l * npc + a -> j
  std::vector<Point> coords;                   // by j
  std::vector<std::uint64_t> node_key;         // by j
  std::vector<std::int64_t> global_dof;        // by j; -1 when constrained
  std::vector<std::int64_t> owner_cell;        // by j; local id of the
                                               // smallest containing cell
  std::vector<std::int64_t> cell_global_dofs;  // any local id l * npc + a
  std::int64_t owned_begin = 0;                // owned global range
  std::int64_t owned_end = 0;
  std::int64_t num_global = 0;                 // total free DOFs

  std::int64_t num_local_dofs() const {
    return static_cast<std::int64_t>(coords.size());
  }
  bool is_free(std::int64_t j) const { return global_dof[j] >= 0; }
  std::span<const std::int64_t> local_dofs(std::int64_t l) const {
    return {cell_local_dofs.data() + l * nodes_per_cell,
            static_cast<std::size_t>(nodes_per_cell)};
  }
  std::span<const std::int64_t> global_dofs(std::int64_t l) const {
    return {cell_global_dofs.data() + l * nodes_per_cell,
            static_cast<std::size_t>(nodes_per_cell)};
  }
};

// Numbers the free DOFs across subdomains: each free node is owned by the
// smallest subdomain among its incident cells, owners number their nodes by
// first touch over interior cells in ascending global id, offsets come from
// an exclusive scan, and two neighbor exchanges of cell-wise id arrays
// complete the interface and ghost cells.
std::vector<DistStdSpace> number_dofs_distributed(Runtime& rt,
                                                  const BackgroundGrid& grid,
                                                  std::span<const SubdomainMesh> meshes,
                                                  int order);

// Nodal coordinates and global DOF ids of an owned cell, as shipped to
// subdomains that import it as a root.
CellNodeData cell_node_data(const BackgroundGrid& grid, const DistStdSpace& space,
                            const SubdomainMesh& mesh, std::int64_t local_cell);

// Constraints of one subdomain; rows are indexed by local DOF j and masters
// are global free DOF ids.
AgConstraints build_constraints_distributed(const BackgroundGrid& grid,
                                            const DistStdSpace& space,
                                            const SubdomainMesh& mesh,
                                            const DistRootMap& map,
                                            const RootImportPlan& plan,
                                            const RootDataBuffer& buffer);

}  // namespace agfem

#endif  // AGFEM_DIST_FE_SPACE_HPP_
