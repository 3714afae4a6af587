// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agfem/errors.hpp"

namespace agfem {

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

double distance_squared(const Point& a, const Point& b) {
  const Point d = sub(a, b);
  return dot(d, d);
}

std::uint64_t morton_encode(const Lattice& cell, int dim, int bits) {
  std::uint64_t key = 0;
  for (int b = 0; b < bits; ++b) {
    for (int a = 0; a < dim; ++a) {
      const std::uint64_t bit = (static_cast<std::uint64_t>(cell[a]) >> b) & 1u;
      key |= bit << (b * dim + a);
    }
  }
  return key;
}

Lattice morton_decode(std::uint64_t key, int dim, int bits) {
  Lattice cell{0, 0, 0};
  for (int b = 0; b < bits; ++b) {
    for (int a = 0; a < dim; ++a) {
      const std::uint64_t bit = (key >> (b * dim + a)) & 1u;
      cell[a] |= static_cast<std::int64_t>(bit << b);
    }
  }
  return cell;
}

BackgroundGrid::BackgroundGrid(const BoundingBox& box, int level, int dim)
    : box_(box), level_(level), dim_(dim) {
  if (dim != 2 && dim != 3) {
    throw ContractViolation("grid dimension must be 2 or 3, got " +
                            std::to_string(dim));
  }
  if (level < 0) {
    throw ContractViolation("refinement level must be non-negative");
  }
  // Keep one spare bit so cell counts fit a signed 64-bit integer.
  if (static_cast<long long>(level) * dim > 62) {
    throw GridOverflowError("level " + std::to_string(level) + " in " +
                            std::to_string(dim) +
                            "D overflows the 64-bit cell count");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(box.extent[a] > 0.0)) {
      throw ContractViolation("bounding box extent must be positive");
    }
  }
  n_ = std::int64_t{1} << level;
  num_cells_ = std::int64_t{1} << (level * dim);
  for (int a = 0; a < 3; ++a) {
    h_[a] = a < dim ? box.extent[a] / static_cast<double>(n_) : 0.0;
  }
}

double BackgroundGrid::min_cell_size() const {
  double h = h_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, h_[a]);
  return h;
}

double BackgroundGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= h_[a];
  return v;
}

std::uint64_t BackgroundGrid::morton(const Lattice& cell) const {
  if (!contains(cell)) {
    throw ContractViolation("lattice index outside the grid");
  }
  return morton_encode(cell, dim_, level_);
}

Lattice BackgroundGrid::lattice(std::uint64_t key) const {
  if (key >= static_cast<std::uint64_t>(num_cells_)) {
    throw ContractViolation("Morton key outside the grid");
  }
  return morton_decode(key, dim_, level_);
}

bool BackgroundGrid::contains(const Lattice& cell) const {
  for (int a = 0; a < dim_; ++a) {
    if (cell[a] < 0 || cell[a] >= n_) return false;
  }
  for (int a = dim_; a < 3; ++a) {
    if (cell[a] != 0) return false;
  }
  return true;
}

double BackgroundGrid::node_coordinate(int axis, std::int64_t index,
                                       int order) const {
  if (axis >= dim_) return 0.0;
  const double denom = static_cast<double>(n_ * order);
  return box_.origin[axis] +
         box_.extent[axis] * static_cast<double>(index) / denom;
}

Point BackgroundGrid::vertex(const Lattice& cell, int corner) const {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    x[a] = node_coordinate(a, cell[a] + ((corner >> a) & 1));
  }
  return x;
}

Point BackgroundGrid::barycenter(const Lattice& cell) const {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    x[a] = 0.5 * (node_coordinate(a, cell[a]) + node_coordinate(a, cell[a] + 1));
  }
  return x;
}

BoundingBox BackgroundGrid::cell_box(const Lattice& cell) const {
  BoundingBox b;
  b.origin = vertex(cell, 0);
  const Point upper = vertex(cell, vertices_per_cell() - 1);
  b.extent = sub(upper, b.origin);
  for (int a = dim_; a < 3; ++a) b.extent[a] = 0.0;
  return b;
}

std::vector<Lattice> BackgroundGrid::face_neighbors(const Lattice& cell) const {
  if (!contains(cell)) {
    throw ContractViolation("face_neighbors: cell outside the grid");
  }
  std::vector<Lattice> out;
  out.reserve(2 * dim_);
  for (int a = 0; a < dim_; ++a) {
    for (int side : {-1, 1}) {
      Lattice c = cell;
      c[a] += side;
      if (contains(c)) out.push_back(c);
    }
  }
  return out;
}

std::vector<Lattice> BackgroundGrid::vertex_neighbors(const Lattice& cell) const {
  std::vector<Lattice> out;
  const int dz = dim_ == 3 ? 1 : 0;
  for (int k = -dz; k <= dz; ++k) {
    for (int j = -1; j <= 1; ++j) {
      for (int i = -1; i <= 1; ++i) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Lattice c{cell[0] + i, cell[1] + j, cell[2] + k};
        if (contains(c)) out.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), [this](const Lattice& a, const Lattice& b) {
    return morton(a) < morton(b);
  });
  return out;
}

}  // namespace agfem
