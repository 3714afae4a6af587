// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/classification.hpp"

#include <cmath>
#include <cstdlib>
#include <span>
#include <sstream>

#include "agfem/errors.hpp"
#include "agfem/quadrature.hpp"

namespace agfem {
namespace {

constexpr double kMinVolumeFraction = 1e-14;

std::string describe_cell(const Lattice& c, std::uint64_t key) {
  std::ostringstream s;
  s << "cell " << key << " (lattice " << c[0] << "," << c[1] << "," << c[2]
    << ")";
  return s.str();
}

}  // namespace

CellClassification classify_cells(const BackgroundGrid& grid, const LevelSet& ls,
                                  double tol) {
  if (tol < 0.0) tol = default_tolerance(grid);
  const int d = grid.dim();
  const std::int64_t n = grid.cells_per_axis();
  const std::int64_t nv1 = n + 1;
  const std::int64_t nz = d == 3 ? nv1 : 1;

  // Sample psi once per lattice vertex.
  std::vector<double> psi(static_cast<std::size_t>(nv1 * nv1 * nz));
  for (std::int64_t k = 0; k < nz; ++k) {
    for (std::int64_t j = 0; j < nv1; ++j) {
      for (std::int64_t i = 0; i < nv1; ++i) {
        const Point x{grid.node_coordinate(0, i), grid.node_coordinate(1, j),
                      d == 3 ? grid.node_coordinate(2, k) : 0.0};
        psi[(k * nv1 + j) * nv1 + i] = ls.value(x);
      }
    }
  }

  CellClassification out;
  out.tolerance = tol;
  const auto num = static_cast<std::size_t>(grid.num_cells());
  out.kind.assign(num, CellKind::exterior);
  out.active_id.assign(num, -1);

  const int nv = grid.vertices_per_cell();
  const double cell_volume = grid.cell_volume();
  std::array<double, 8> values{};
  for (std::uint64_t key = 0; key < num; ++key) {
    const Lattice c = grid.lattice(key);
    int inside = 0;
    for (int v = 0; v < nv; ++v) {
      const std::int64_t i = c[0] + (v & 1);
      const std::int64_t j = c[1] + ((v >> 1) & 1);
      const std::int64_t k = c[2] + ((v >> 2) & 1);
      const double p = psi[(k * nv1 + j) * nv1 + i];
      if (!std::isfinite(p)) {
        throw ClassificationError(
            "level set is not finite at a vertex of " + describe_cell(c, key),
            key);
      }
      values[v] = clamp_vertex_value(p, tol);
      if (values[v] < 0.0) ++inside;
    }
    CellKind kind = CellKind::exterior;
    if (inside == nv) {
      kind = CellKind::interior;
    } else if (inside > 0) {
      const CutQuadrature q = clipped_quadrature(
          grid.cell_box(c), d, std::span<const double>(values.data(), nv), 1);
      if (q.bulk.measure() >= kMinVolumeFraction * cell_volume) {
        kind = CellKind::cut;
      }
    }
    out.kind[key] = kind;
    if (kind != CellKind::exterior) {
      const auto id = static_cast<std::int64_t>(out.active_cells.size());
      out.active_id[key] = id;
      out.active_cells.push_back(key);
      if (kind == CellKind::interior) {
        out.interior_cells.push_back(id);
      } else {
        out.cut_cells.push_back(id);
      }
    }
  }
  return out;
}

bool face_is_active(const BackgroundGrid& grid, const LevelSet& ls,
                    const Lattice& a, const Lattice& b, double tol) {
  if (tol < 0.0) tol = default_tolerance(grid);
  int axis = -1;
  int dist = 0;
  for (int ax = 0; ax < 3; ++ax) {
    const std::int64_t diff = b[ax] - a[ax];
    if (diff != 0) {
      axis = ax;
      dist += static_cast<int>(std::llabs(diff));
    }
  }
  if (dist != 1 || !grid.contains(a) || !grid.contains(b)) {
    throw ContractViolation("face_is_active: cells are not face neighbors");
  }
  // Corners of `a` lying on the shared face.
  const int side = b[axis] > a[axis] ? 1 : 0;
  for (int v = 0; v < grid.vertices_per_cell(); ++v) {
    if (((v >> axis) & 1) != side) continue;
    if (ls.value(grid.vertex(a, v)) < -tol) return true;
  }
  return false;
}

}  // namespace agfem
