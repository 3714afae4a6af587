// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_AGGREGATION_HPP_
#define AGFEM_AGGREGATION_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "agfem/classification.hpp"
#include "agfem/geometry.hpp"
#include "agfem/level_set.hpp"

namespace agfem {

struct FaceLink {
  std::int64_t cell;  // active id of the neighbor
  bool active;        // shared face meets the domain
};

// Active-cell connectivity consumed by the aggregation algorithms.
struct ActiveMesh {
  std::vector<bool> interior;                   // by active id
  std::vector<std::vector<FaceLink>> neighbors; // by active id, face order
  std::vector<Point> barycenter;                // by active id
  std::vector<Lattice> lattice;                 // by active id

  std::int64_t size() const { return static_cast<std::int64_t>(interior.size()); }
};

ActiveMesh build_active_mesh(const BackgroundGrid& grid, const LevelSet& ls,
                             const CellClassification& cls);

// Aggregation maps. root[k] is the interior cell of k's aggregate and
// next[k] the face neighbor on the path towards it.
struct RootMap {
  std::vector<std::int64_t> root;
  std::vector<std::int64_t> next;
  int rounds = 0;
};

// Candidate ordering shared by the serial and distributed sweeps: the
// closest root barycenter wins, ties go to the smaller candidate id.
inline bool better_candidate(double dist2, std::int64_t id, double best_dist2,
                             std::int64_t best_id) {
  if (best_id < 0) return true;
  if (dist2 != best_dist2) return dist2 < best_dist2;
  return id < best_id;
}

RootMap aggregate_serial(const ActiveMesh& mesh);

struct AggregateSet {
  std::map<std::int64_t, std::vector<std::int64_t>> members;  // root -> cells
  std::size_t max_size = 0;
  int max_path_length = 0;
};

// Groups cells by root and checks that every aggregate holds exactly one
// interior cell and that each cut cell reaches it through active faces.
AggregateSet aggregates(const RootMap& map, const ActiveMesh& mesh);

}  // namespace agfem

#endif  // AGFEM_AGGREGATION_HPP_
