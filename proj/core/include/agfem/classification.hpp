// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_CLASSIFICATION_HPP_
#define AGFEM_CLASSIFICATION_HPP_

#include <cstdint>
#include <vector>

#include "agfem/geometry.hpp"
#include "agfem/level_set.hpp"

namespace agfem {

enum class CellKind : std::uint8_t { exterior = 0, interior = 1, cut = 2 };

// Per-cell labels and the active-cell numbering.
//
// Active ids are 0-based and contiguous, assigned in Morton order over the
// non-exterior cells.
struct CellClassification {
  double tolerance = 0.0;
  std::vector<CellKind> kind;                // by Morton key
  std::vector<std::int64_t> active_id;       // by Morton key, -1 if exterior
  std::vector<std::uint64_t> active_cells;   // active id -> Morton key
  std::vector<std::int64_t> interior_cells;  // ascending active ids
  std::vector<std::int64_t> cut_cells;       // ascending active ids

  std::int64_t num_active() const {
    return static_cast<std::int64_t>(active_cells.size());
  }
  CellKind active_kind(std::int64_t id) const { return kind[active_cells[id]]; }
  bool is_interior(std::int64_t id) const {
    return active_kind(id) == CellKind::interior;
  }
};

// Labels every background cell. A negative `tol` selects the default
// 1e-12 * h. Cut cells whose clipped volume falls below 1e-14 of the cell
// volume are demoted to exterior.
CellClassification classify_cells(const BackgroundGrid& grid, const LevelSet& ls,
                                  double tol = -1.0);

// True iff the face shared by two face-neighboring cells meets the domain,
// i.e. some face vertex is strictly inside. Under linear interpolation along
// face edges a crossing always has an inside endpoint, so this also covers
// partially inside edges.
bool face_is_active(const BackgroundGrid& grid, const LevelSet& ls,
                    const Lattice& a, const Lattice& b, double tol = -1.0);

}  // namespace agfem

#endif  // AGFEM_CLASSIFICATION_HPP_
