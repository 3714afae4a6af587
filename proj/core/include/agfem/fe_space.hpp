// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_FE_SPACE_HPP_
#define AGFEM_FE_SPACE_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "agfem/aggregation.hpp"
#include "agfem/classification.hpp"
#include "agfem/geometry.hpp"

namespace agfem {

// Tensor-product Lagrange basis of degree `order` on an axis-aligned box,
// with equispaced nodes. Local node a has multi-index (ax, ay, az) with
// a = ax + (q+1) ay + (q+1)^2 az.
class LagrangeBasis {
 public:
  LagrangeBasis(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return size_; }
  std::array<int, 3> multi_index(int a) const;

  // Values and gradients at any point, including points outside the box
  // (extrapolation).
  void values(const BoundingBox& box, const Point& x, std::span<double> out) const;
  void gradients(const BoundingBox& box, const Point& x,
                 std::span<Point> out) const;

 private:
  void eval_1d(double xi, std::span<double> v, std::span<double> dv) const;

  int dim_;
  int order_;
  int size_;
};

// Box spanned by the first and last node of a cell's node list.
BoundingBox box_from_nodes(std::span<const Point> nodes, int dim);

// Node lattice helpers shared by the serial and distributed spaces.
struct NodeLattice {
  int dim;
  int order;
  std::int64_t per_axis;  // n * q + 1

  NodeLattice(const BackgroundGrid& grid, int order);
  std::uint64_t key(const Lattice& cell, const std::array<int, 3>& local) const;
  Point coordinate(const BackgroundGrid& grid, const Lattice& cell,
                   const std::array<int, 3>& local) const;
};

// Conforming Q_q space over the active cells.
struct StdSpace {
  int dim = 2;
  int order = 1;
  int nodes_per_cell = 4;
  std::int64_t num_dofs = 0;
  std::vector<std::int64_t> cell_dofs;  // active id * nodes_per_cell + a
  std::vector<Point> coords;            // by dof
  std::vector<std::uint64_t> node_key;  // by dof

  std::span<const std::int64_t> dofs(std::int64_t cell) const {
    return {cell_dofs.data() + cell * nodes_per_cell,
            static_cast<std::size_t>(nodes_per_cell)};
  }
};

// DOFs are numbered by first touch over active cells in ascending id.
StdSpace build_std_space(const BackgroundGrid& grid, const CellClassification& cls,
                         int order);

// Nodal coordinates of one cell of the space.
std::vector<Point> cell_nodes(const StdSpace& space, std::int64_t cell);

struct DofClassification {
  std::vector<std::int64_t> interior_index;  // by dof; -1 for exterior DOFs
  std::vector<std::int64_t> interior_dofs;   // interior index -> dof
  std::vector<std::int64_t> exterior_dofs;   // ascending
  std::vector<std::int64_t> owner_cell;      // by dof: smallest containing cell
  std::vector<std::int64_t> root_cell;       // by dof: root of owner cell (exterior)

  std::int64_t num_interior() const {
    return static_cast<std::int64_t>(interior_dofs.size());
  }
  bool is_interior(std::int64_t dof) const { return interior_index[dof] >= 0; }
};

// Interior DOFs are those touched by an interior cell, numbered by first
// touch over interior cells. With `roots`, exterior DOFs also get their
// root cell.
DofClassification classify_dofs(const StdSpace& space, const CellClassification& cls,
                                const RootMap* roots = nullptr);

// Extrapolation constraints for the exterior DOFs. Rows are indexed by
// constrained DOF (serial: dof id; distributed: subdomain-local id); masters
// are interior DOF ids of the free numbering.
struct AgConstraints {
  std::vector<std::int64_t> constrained;
  std::vector<std::int64_t> offsets{0};
  std::vector<std::int64_t> masters;
  std::vector<double> coefficients;
  std::vector<std::int64_t> row_of;  // dof -> row, -1 if unconstrained

  std::int64_t size() const {
    return static_cast<std::int64_t>(constrained.size());
  }
  std::span<const std::int64_t> masters_of(std::int64_t row) const {
    return {masters.data() + offsets[row],
            static_cast<std::size_t>(offsets[row + 1] - offsets[row])};
  }
  std::span<const double> coefficients_of(std::int64_t row) const {
    return {coefficients.data() + offsets[row],
            static_cast<std::size_t>(offsets[row + 1] - offsets[row])};
  }
  void add_row(std::int64_t dof, std::span<const std::int64_t> m,
               std::span<const double> c);
};

AgConstraints build_constraints_serial(const StdSpace& space,
                                       const DofClassification& dofs,
                                       const RootMap& roots);

// Full nodal vector from values on the interior DOFs.
std::vector<double> prolongate(const StdSpace& space, const DofClassification& dofs,
                               const AgConstraints& constraints,
                               std::span<const double> interior);

}  // namespace agfem

#endif  // AGFEM_FE_SPACE_HPP_
