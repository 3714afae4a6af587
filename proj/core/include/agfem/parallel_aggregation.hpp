// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_PARALLEL_AGGREGATION_HPP_
#define AGFEM_PARALLEL_AGGREGATION_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "agfem/geometry.hpp"
#include "agfem/partition.hpp"
#include "agfem/runtime.hpp"

namespace agfem {

// Aggregation maps of one subdomain, indexed by local id (local and ghost).
// All cell ids stored are global active ids.
struct DistRootMap {
  std::vector<std::int64_t> root;
  std::vector<int> root_owner;
  std::vector<std::int64_t> next;
  std::vector<Point> root_barycenter;
};

struct DistAggregation {
  std::vector<DistRootMap> maps;  // by subdomain
  int rounds = 0;                 // sweep supersteps executed
};

struct ParallelAggregationOptions {
  // Test hook: called on every ghost update a process applies, may alter
  // the received root id.
  std::function<void(int subdomain, std::int64_t cell, std::int64_t& root)>
      on_ghost_update;
};

DistAggregation aggregate_parallel(Runtime& rt,
                                   std::span<const SubdomainMesh> meshes,
                                   const ParallelAggregationOptions& options = {});

// Import plan for remote root cells of one subdomain.
struct RootImportPlan {
  std::vector<int> recv_from;                    // Q^rcv, ascending
  std::vector<std::vector<std::int64_t>> recv;   // R^rcv per recv_from entry
  std::vector<int> send_to;                      // Q^snd, ascending
  std::vector<std::vector<std::int64_t>> send;   // R^snd per send_to entry
  std::vector<std::int64_t> remote_roots;        // K^R ascending; Z = position

  // Z(k), or -1 when k is not imported.
  std::int64_t slot_of(std::int64_t root) const;
};

// Receive side of the plan (communication free scan of local and ghost cut
// cells whose root lives on another subdomain).
void build_direct_plan(const SubdomainMesh& mesh, const DistRootMap& map,
                       RootImportPlan& plan);

// Send side, by forwarding path tuples along the next-cell maps.
void build_inverse_plan(Runtime& rt, std::span<const SubdomainMesh> meshes,
                        std::span<const DistRootMap> maps,
                        std::span<RootImportPlan> plans);

std::vector<RootImportPlan> build_import_plans(Runtime& rt,
                                               std::span<const SubdomainMesh> meshes,
                                               std::span<const DistRootMap> maps);

// Data a subdomain publishes for one of its local cells.
struct CellNodeData {
  std::vector<Point> coords;          // per cell-local node
  std::vector<std::int64_t> dofs;     // global DOF id per node, -1 if none
};

// Imported root-cell data, laid out by slot Z.
struct RootDataBuffer {
  int nodes_per_cell = 0;
  std::vector<Point> coords;           // slot * nodes_per_cell + a
  std::vector<std::int64_t> dofs;      // slot * nodes_per_cell + a

  std::span<const Point> cell_coords(std::int64_t slot) const {
    return {coords.data() + slot * nodes_per_cell,
            static_cast<std::size_t>(nodes_per_cell)};
  }
  std::span<const std::int64_t> cell_dofs(std::int64_t slot) const {
    return {dofs.data() + slot * nodes_per_cell,
            static_cast<std::size_t>(nodes_per_cell)};
  }
};

using CellDataProvider =
    std::function<CellNodeData(int subdomain, std::int64_t local_cell)>;

std::vector<RootDataBuffer> import_root_data(Runtime& rt,
                                             std::span<const SubdomainMesh> meshes,
                                             std::span<const RootImportPlan> plans,
                                             int nodes_per_cell,
                                             const CellDataProvider& provider);

}  // namespace agfem

#endif  // AGFEM_PARALLEL_AGGREGATION_HPP_
