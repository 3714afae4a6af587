// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/aggregation.hpp"

#include <algorithm>
#include <string>

#include "agfem/errors.hpp"

namespace agfem {

ActiveMesh build_active_mesh(const BackgroundGrid& grid, const LevelSet& ls,
                             const CellClassification& cls) {
  const std::int64_t n = cls.num_active();
  ActiveMesh mesh;
  mesh.interior.resize(n);
  mesh.neighbors.resize(n);
  mesh.barycenter.resize(n);
  mesh.lattice.resize(n);
  for (std::int64_t k = 0; k < n; ++k) {
    const Lattice c = grid.lattice(cls.active_cells[k]);
    mesh.interior[k] = cls.is_interior(k);
    mesh.barycenter[k] = grid.barycenter(c);
    mesh.lattice[k] = c;
    for (const Lattice& nb : grid.face_neighbors(c)) {
      const std::int64_t id = cls.active_id[grid.morton(nb)];
      if (id < 0) continue;
      mesh.neighbors[k].push_back(
          {id, face_is_active(grid, ls, c, nb, cls.tolerance)});
    }
  }
  return mesh;
}

RootMap aggregate_serial(const ActiveMesh& mesh) {
  const std::int64_t n = mesh.size();
  RootMap map;
  map.root.assign(n, -1);
  map.next.assign(n, -1);
  std::vector<std::int64_t> pending;
  for (std::int64_t k = 0; k < n; ++k) {
    if (mesh.interior[k]) {
      map.root[k] = k;
      map.next[k] = k;
    } else {
      pending.push_back(k);
    }
  }
  // Jacobi-style rounds: candidates must have been touched before the round
  // started, so the result does not depend on the sweep order.
  std::vector<char> touched(n);
  while (!pending.empty()) {
    for (std::int64_t k = 0; k < n; ++k) touched[k] = map.root[k] >= 0;
    std::vector<std::int64_t> still;
    for (std::int64_t k : pending) {
      std::int64_t best = -1;
      double best_d2 = 0.0;
      for (const FaceLink& f : mesh.neighbors[k]) {
        if (!f.active || !touched[f.cell]) continue;
        const double d2 = distance_squared(mesh.barycenter[k],
                                           mesh.barycenter[map.root[f.cell]]);
        if (better_candidate(d2, f.cell, best_d2, best)) {
          best = f.cell;
          best_d2 = d2;
        }
      }
      if (best < 0) {
        still.push_back(k);
      } else {
        map.root[k] = map.root[best];
        map.next[k] = best;
      }
    }
    if (still.size() == pending.size()) {
      std::string ids;
      for (std::size_t i = 0; i < still.size() && i < 16; ++i) {
        ids += (i ? "," : "") + std::to_string(still[i]);
      }
      if (still.size() > 16) ids += ",...";
      throw AggregationStalledError(
          "aggregation stalled; cells without a path to an interior cell: " + ids,
          std::move(still));
    }
    pending = std::move(still);
    ++map.rounds;
  }
  return map;
}

AggregateSet aggregates(const RootMap& map, const ActiveMesh& mesh) {
  const std::int64_t n = mesh.size();
  if (static_cast<std::int64_t>(map.root.size()) != n ||
      static_cast<std::int64_t>(map.next.size()) != n) {
    throw ContractViolation("aggregates: map size does not match the mesh");
  }
  AggregateSet set;
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t r = map.root[k];
    if (r < 0 || r >= n || map.next[k] < 0 || map.next[k] >= n) {
      throw AggregateValidationError(
          "cell " + std::to_string(k) + " has no valid root/next entry", r);
    }
    set.members[r].push_back(k);
  }
  for (const auto& [r, cells] : set.members) {
    const std::string tag = "aggregate rooted at " + std::to_string(r);
    if (!mesh.interior[r]) {
      throw AggregateValidationError(tag + ": root is not an interior cell", r);
    }
    int interior = 0;
    for (std::int64_t k : cells) {
      if (!mesh.interior[k]) continue;
      ++interior;
      if (k != r || map.next[k] != k) {
        throw AggregateValidationError(
            tag + ": contains foreign interior cell " + std::to_string(k), r);
      }
    }
    if (interior != 1) {
      throw AggregateValidationError(tag + ": expected one interior cell", r);
    }
    for (std::int64_t k : cells) {
      int steps = 0;
      std::int64_t cur = k;
      while (cur != r) {
        const std::int64_t nx = map.next[cur];
        const auto& nbs = mesh.neighbors[cur];
        const bool linked = std::any_of(nbs.begin(), nbs.end(), [&](const FaceLink& f) {
          return f.cell == nx && f.active;
        });
        if (!linked || map.root[nx] != r || ++steps > n) {
          throw AggregateValidationError(
              tag + ": broken active-face path from cell " + std::to_string(k), r);
        }
        cur = nx;
      }
      set.max_path_length = std::max(set.max_path_length, steps);
    }
    set.max_size = std::max(set.max_size, cells.size());
  }
  return set;
}

}  // namespace agfem
