// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/fe_space.hpp"

#include <string>
#include <unordered_map>

#include "agfem/errors.hpp"

namespace agfem {

LagrangeBasis::LagrangeBasis(int dim, int order) : dim_(dim), order_(order) {
  if (dim != 2 && dim != 3) throw ContractViolation("basis dimension must be 2 or 3");
  if (order < 1 || order > 8) throw ContractViolation("basis order must be in 1..8");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= order + 1;
}

std::array<int, 3> LagrangeBasis::multi_index(int a) const {
  const int m = order_ + 1;
  return {a % m, (a / m) % m, dim_ == 3 ? a / (m * m) : 0};
}

void LagrangeBasis::eval_1d(double xi, std::span<double> v,
                            std::span<double> dv) const {
  const int q = order_;
  for (int i = 0; i <= q; ++i) {
    const double xi_i = static_cast<double>(i) / q;
    double val = 1.0;
    double der = 0.0;
    for (int j = 0; j <= q; ++j) {
      if (j == i) continue;
      const double xi_j = static_cast<double>(j) / q;
      const double f = (xi - xi_j) / (xi_i - xi_j);
      der = der * f + val / (xi_i - xi_j);
      val *= f;
    }
    v[i] = val;
    dv[i] = der;
  }
}

void LagrangeBasis::values(const BoundingBox& box, const Point& x,
                           std::span<double> out) const {
  std::array<std::array<double, 9>, 3> v{};
  std::array<std::array<double, 9>, 3> dv{};
  for (int a = 0; a < dim_; ++a) {
    const double xi = (x[a] - box.origin[a]) / box.extent[a];
    eval_1d(xi, v[a], dv[a]);
  }
  for (int n = 0; n < size_; ++n) {
    const auto m = multi_index(n);
    double p = v[0][m[0]] * v[1][m[1]];
    if (dim_ == 3) p *= v[2][m[2]];
    out[n] = p;
  }
}

void LagrangeBasis::gradients(const BoundingBox& box, const Point& x,
                              std::span<Point> out) const {
  std::array<std::array<double, 9>, 3> v{};
  std::array<std::array<double, 9>, 3> dv{};
  for (int a = 0; a < dim_; ++a) {
    const double xi = (x[a] - box.origin[a]) / box.extent[a];
    eval_1d(xi, v[a], dv[a]);
    for (double& d : dv[a]) d /= box.extent[a];
  }
  for (int n = 0; n < size_; ++n) {
    const auto m = multi_index(n);
    if (dim_ == 2) {
      out[n] = {dv[0][m[0]] * v[1][m[1]], v[0][m[0]] * dv[1][m[1]], 0.0};
    } else {
      out[n] = {dv[0][m[0]] * v[1][m[1]] * v[2][m[2]],
                v[0][m[0]] * dv[1][m[1]] * v[2][m[2]],
                v[0][m[0]] * v[1][m[1]] * dv[2][m[2]]};
    }
  }
}

BoundingBox box_from_nodes(std::span<const Point> nodes, int dim) {
  BoundingBox b;
  b.origin = nodes.front();
  b.extent = sub(nodes.back(), nodes.front());
  for (int a = dim; a < 3; ++a) {
    b.origin[a] = 0.0;
    b.extent[a] = 0.0;
  }
  return b;
}

NodeLattice::NodeLattice(const BackgroundGrid& grid, int q)
    : dim(grid.dim()), order(q), per_axis(grid.cells_per_axis() * q + 1) {}

std::uint64_t NodeLattice::key(const Lattice& cell,
                               const std::array<int, 3>& local) const {
  const auto i = static_cast<std::uint64_t>(cell[0] * order + local[0]);
  const auto j = static_cast<std::uint64_t>(cell[1] * order + local[1]);
  const auto k = static_cast<std::uint64_t>(cell[2] * order + local[2]);
  const auto m = static_cast<std::uint64_t>(per_axis);
  return i + m * (j + m * k);
}

Point NodeLattice::coordinate(const BackgroundGrid& grid, const Lattice& cell,
                              const std::array<int, 3>& local) const {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    x[a] = grid.node_coordinate(a, cell[a] * order + local[a], order);
  }
  return x;
}

StdSpace build_std_space(const BackgroundGrid& grid, const CellClassification& cls,
                         int order) {
  const LagrangeBasis basis(grid.dim(), order);
  const NodeLattice nodes(grid, order);
  StdSpace space;
  space.dim = grid.dim();
  space.order = order;
  space.nodes_per_cell = basis.size();
  const std::int64_t n = cls.num_active();
  space.cell_dofs.resize(n * basis.size());
  std::unordered_map<std::uint64_t, std::int64_t> ids;
  ids.reserve(static_cast<std::size_t>(n * 2));
  for (std::int64_t k = 0; k < n; ++k) {
    const Lattice c = grid.lattice(cls.active_cells[k]);
    for (int a = 0; a < basis.size(); ++a) {
      const auto m = basis.multi_index(a);
      const std::uint64_t key = nodes.key(c, m);
      auto [it, inserted] = ids.try_emplace(key, space.num_dofs);
      if (inserted) {
        ++space.num_dofs;
        space.coords.push_back(nodes.coordinate(grid, c, m));
        space.node_key.push_back(key);
      }
      space.cell_dofs[k * basis.size() + a] = it->second;
    }
  }
  return space;
}

std::vector<Point> cell_nodes(const StdSpace& space, std::int64_t cell) {
  std::vector<Point> out;
  for (std::int64_t d : space.dofs(cell)) out.push_back(space.coords[d]);
  return out;
}

DofClassification classify_dofs(const StdSpace& space, const CellClassification& cls,
                                const RootMap* roots) {
  DofClassification out;
  out.interior_index.assign(space.num_dofs, -1);
  out.owner_cell.assign(space.num_dofs, -1);
  out.root_cell.assign(space.num_dofs, -1);
  for (std::int64_t k : cls.interior_cells) {
    for (std::int64_t d : space.dofs(k)) {
      if (out.interior_index[d] >= 0) continue;
      out.interior_index[d] = out.num_interior();
      out.interior_dofs.push_back(d);
    }
  }
  // Cells are visited in ascending id, so the first visit is the smallest.
  for (std::int64_t k = 0; k < cls.num_active(); ++k) {
    for (std::int64_t d : space.dofs(k)) {
      if (out.owner_cell[d] < 0) out.owner_cell[d] = k;
    }
  }
  for (std::int64_t d = 0; d < space.num_dofs; ++d) {
    if (out.interior_index[d] >= 0) continue;
    out.exterior_dofs.push_back(d);
    if (roots) out.root_cell[d] = roots->root[out.owner_cell[d]];
  }
  return out;
}

void AgConstraints::add_row(std::int64_t dof, std::span<const std::int64_t> m,
                            std::span<const double> c) {
  if (dof >= static_cast<std::int64_t>(row_of.size())) row_of.resize(dof + 1, -1);
  row_of[dof] = size();
  constrained.push_back(dof);
  masters.insert(masters.end(), m.begin(), m.end());
  coefficients.insert(coefficients.end(), c.begin(), c.end());
  offsets.push_back(static_cast<std::int64_t>(masters.size()));
}

AgConstraints build_constraints_serial(const StdSpace& space,
                                       const DofClassification& dofs,
                                       const RootMap& roots) {
  const LagrangeBasis basis(space.dim, space.order);
  AgConstraints out;
  out.row_of.assign(space.num_dofs, -1);
  std::vector<std::int64_t> m(basis.size());
  std::vector<double> c(basis.size());
  for (std::int64_t d : dofs.exterior_dofs) {
    const std::int64_t root = roots.root[dofs.owner_cell[d]];
    const auto root_dofs = space.dofs(root);
    for (int a = 0; a < basis.size(); ++a) {
      m[a] = dofs.interior_index[root_dofs[a]];
      if (m[a] < 0) {
        throw AssemblyError("root cell " + std::to_string(root) +
                            " has a DOF without a free id");
      }
    }
    const auto nodes = cell_nodes(space, root);
    basis.values(box_from_nodes(nodes, space.dim), space.coords[d], c);
    out.add_row(d, m, c);
  }
  return out;
}

std::vector<double> prolongate(const StdSpace& space, const DofClassification& dofs,
                               const AgConstraints& constraints,
                               std::span<const double> interior) {
  if (static_cast<std::int64_t>(interior.size()) != dofs.num_interior()) {
    throw ContractViolation("prolongate: vector size must equal the free DOF count");
  }
  std::vector<double> full(space.num_dofs, 0.0);
  for (std::int64_t i = 0; i < dofs.num_interior(); ++i) {
    full[dofs.interior_dofs[i]] = interior[i];
  }
  for (std::int64_t r = 0; r < constraints.size(); ++r) {
    const auto m = constraints.masters_of(r);
    const auto c = constraints.coefficients_of(r);
    double v = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) v += c[j] * interior[m[j]];
    full[constraints.constrained[r]] = v;
  }
  return full;
}

}  // namespace agfem
