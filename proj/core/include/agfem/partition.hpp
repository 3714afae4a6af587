// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_PARTITION_HPP_
#define AGFEM_PARTITION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "agfem/aggregation.hpp"
#include "agfem/classification.hpp"
#include "agfem/geometry.hpp"

namespace agfem {

// Splits a sequence of positive weights into `parts` contiguous, nonempty
// ranges. Returns parts + 1 boundaries. The spread between the heaviest and
// lightest range never exceeds the largest single weight.
std::vector<std::int64_t> split_weighted(std::span<const double> weights,
                                         int parts);

// Assignment of background cells to subdomains along the Morton curve.
// Subdomain ids are 0-based.
struct Partition {
  int num_parts = 1;
  std::vector<int> owner;          // by Morton key (exterior cells included)
  std::vector<double> weight;      // by Morton key
  std::vector<int> active_owner;   // by active id

  std::vector<double> part_weights() const;
};

// Weighted space-filling-curve partition over all background cells, active
// cells weighted `active_weight` and exterior cells `exterior_weight`.
Partition partition_weighted_sfc(const CellClassification& cls,
                                 double active_weight, int parts,
                                 double exterior_weight = 1.0);

// Same with explicit per-cell weights indexed by Morton key.
Partition partition_weighted_sfc(const CellClassification& cls,
                                 std::span<const double> weights, int parts);

// Partition from an explicit owner table (by Morton key); used for
// hand-built decompositions.
Partition partition_from_owners(const CellClassification& cls,
                                std::vector<int> owner, int parts);

// Local view of one subdomain: owned cells, then the ghost layer of
// vertex-adjacent foreign active cells. Local ids index every per-cell array.
struct SubdomainMesh {
  int id = 0;
  std::int64_t num_local = 0;               // |L^L|
  std::vector<std::int64_t> global;         // local id -> global active id
  std::vector<int> owner;                   // local id -> owning subdomain
  std::vector<bool> interior;               // local id
  std::vector<Point> barycenter;            // local id
  std::vector<Lattice> lattice;             // local id
  std::vector<std::vector<FaceLink>> faces; // local id; FaceLink::cell is local
  std::vector<int> neighbors;               // S^nei, ascending
  // For each neighbor (parallel to `neighbors`): local ids of owned cells
  // that are ghosts over there, ascending in global id.
  std::vector<std::vector<std::int64_t>> shared;

  std::int64_t size() const { return static_cast<std::int64_t>(global.size()); }
  std::int64_t num_ghost() const { return size() - num_local; }
  bool is_local(std::int64_t l) const { return l < num_local; }
  // Global -> local id, or -1 when the cell is not locally relevant.
  std::int64_t local_of(std::int64_t global_id) const;
  // Position of `s` in `neighbors`, or -1.
  int neighbor_index(int s) const;
};

std::vector<SubdomainMesh> build_subdomain_meshes(const BackgroundGrid& grid,
                                                  const CellClassification& cls,
                                                  const ActiveMesh& mesh,
                                                  const Partition& partition);

}  // namespace agfem

#endif  // AGFEM_PARTITION_HPP_
