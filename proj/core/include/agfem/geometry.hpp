// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_GEOMETRY_HPP_
#define AGFEM_GEOMETRY_HPP_

#include <array>
#include <cstdint>
#include <vector>

namespace agfem {

// Points always carry three components; unused trailing ones are zero.
using Point = std::array<double, 3>;

// Integer lattice index of a cell (or of a node on a refined lattice).
using Lattice = std::array<std::int64_t, 3>;

struct BoundingBox {
  Point origin{0.0, 0.0, 0.0};
  Point extent{1.0, 1.0, 1.0};

  static BoundingBox unit() { return {}; }
};

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Point add(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Point scale(double s, const Point& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
double norm(const Point& a);
double distance_squared(const Point& a, const Point& b);

// Uniform Cartesian background mesh with 2^level cells per axis.
//
// Cells are addressed either by lattice index or by their Morton key, which
// interleaves lattice bits with x in the least significant position.
class BackgroundGrid {
 public:
  BackgroundGrid(const BoundingBox& box, int level, int dim);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::int64_t cells_per_axis() const { return n_; }
  std::int64_t num_cells() const { return num_cells_; }
  const BoundingBox& box() const { return box_; }
  double cell_size(int axis) const { return h_[axis]; }
  // Smallest cell size over the active axes.
  double min_cell_size() const;
  double cell_volume() const;
  int vertices_per_cell() const { return 1 << dim_; }

  std::uint64_t morton(const Lattice& cell) const;
  Lattice lattice(std::uint64_t key) const;
  bool contains(const Lattice& cell) const;

  // Coordinate of node `index` along `axis` on the lattice refined `order`
  // times per cell. Cell corners use the same formula, so coordinates shared
  // by neighboring cells agree bit for bit.
  double node_coordinate(int axis, std::int64_t index, int order = 1) const;

  // Corner `corner` of the cell; bit a of `corner` selects the upper side
  // along axis a.
  Point vertex(const Lattice& cell, int corner) const;
  Point barycenter(const Lattice& cell) const;
  BoundingBox cell_box(const Lattice& cell) const;

  // Face neighbors in the order -x, +x, -y, +y, -z, +z.
  std::vector<Lattice> face_neighbors(const Lattice& cell) const;
  // All cells sharing at least a vertex with `cell`, excluding the cell
  // itself, in ascending Morton order.
  std::vector<Lattice> vertex_neighbors(const Lattice& cell) const;

 private:
  BoundingBox box_;
  int level_;
  int dim_;
  std::int64_t n_;
  std::int64_t num_cells_;
  std::array<double, 3> h_{};
};

// Morton key for the given lattice index using `bits` bits per axis.
std::uint64_t morton_encode(const Lattice& cell, int dim, int bits);
Lattice morton_decode(std::uint64_t key, int dim, int bits);

}  // namespace agfem

#endif  // AGFEM_GEOMETRY_HPP_
