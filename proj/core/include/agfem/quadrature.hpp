// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_QUADRATURE_HPP_
#define AGFEM_QUADRATURE_HPP_

#include <span>
#include <utility>
#include <vector>

#include "agfem/geometry.hpp"
#include "agfem/level_set.hpp"

namespace agfem {

struct BulkRule {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double measure() const;
};

struct BoundaryRule {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<Point> normals;  // unit, pointing out of the domain

  std::size_t size() const { return weights.size(); }
  double measure() const;
};

struct CutQuadrature {
  BulkRule bulk;
  BoundaryRule boundary;
};

// Gauss-Legendre nodes and weights on [0, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

// Tensor Gauss rule on the box exact for degree `order` per variable.
BulkRule tensor_rule(const BoundingBox& box, int dim, int order);

// Quadrature for {x in box : I(x) < 0}, where I is the piecewise-linear
// interpolant of `vertex_values` (corner order of BackgroundGrid::vertex) on
// the Kuhn sub-simplices of the box. Values must already be clamped so that
// outside vertices are >= 0 and inside vertices are < 0.
CutQuadrature clipped_quadrature(const BoundingBox& box, int dim,
                                 std::span<const double> vertex_values,
                                 int order);

// Level-set value at a vertex as seen by the classifier: inside values
// (psi < -tol) are kept, everything else is clamped to max(psi, 0).
double clamp_vertex_value(double psi, double tol);

// Default classification tolerance, 1e-12 times the smallest cell size.
double default_tolerance(const BackgroundGrid& grid);

// Cut-cell quadrature of the given cell. Interior cells (all vertices
// inside) get the plain tensor rule and an empty boundary rule.
CutQuadrature cut_quadrature(const BackgroundGrid& grid, const LevelSet& ls,
                             const Lattice& cell, int order, double tol = -1.0);

}  // namespace agfem

#endif  // AGFEM_QUADRATURE_HPP_
