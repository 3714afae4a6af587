// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_ASSEMBLY_HPP_
#define AGFEM_ASSEMBLY_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "agfem/fe_space.hpp"
#include "agfem/quadrature.hpp"
#include "agfem/sparse.hpp"

namespace agfem {

using ScalarField = std::function<double(const Point&)>;

// Dense cell matrix (row-major) and vector.
struct ElementContribution {
  int size = 0;
  std::vector<double> matrix;
  std::vector<double> rhs;

  double& a(int i, int j) { return matrix[i * size + j]; }
  double a(int i, int j) const { return matrix[i * size + j]; }
};

// Element contribution of an active cell, addressed by global active id.
using ElementFn = std::function<ElementContribution(std::int64_t cell)>;

double nitsche_tau_agg(double h, double beta);

struct StdPenalty {
  double tau = 0.0;
  double lambda_max = 0.0;
  bool unbounded = false;  // volume matrix singular beyond constants
  bool floored = false;    // beta * lambda_max fell below beta / h
};

// Cell-wise penalty for the unconstrained space: beta times the largest
// eigenvalue of B x = lambda V x on the complement of the constants, where V
// holds bulk gradient products and B boundary normal-derivative products.
// Floored at beta / h.
StdPenalty nitsche_tau_std(const LagrangeBasis& basis, const BoundingBox& box,
                           const CutQuadrature& quad, double beta, double h);

// Same from explicit V and B (row-major, n x n).
StdPenalty penalty_from_matrices(std::span<const double> volume,
                                 std::span<const double> boundary, int n,
                                 double beta, double h);

// Laplace bulk term plus the symmetric Nitsche boundary terms for
// -lap u = f in the domain, u = g on its boundary.
ElementContribution element_poisson_nitsche(const LagrangeBasis& basis,
                                            const BoundingBox& box,
                                            const CutQuadrature& quad, double tau,
                                            const ScalarField& f,
                                            const ScalarField& g);

struct SerialSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

// One weighted contribution of a cell-local node to a free DOF.
struct DofWeight {
  std::int64_t dof;
  double weight;
};

// Expands each cell-local node into free DOFs, then accumulates every
// element. A free node maps to itself with weight one; a constrained node
// distributes to its masters with the constraint coefficients.
class ConstrainedScatter {
 public:
  explicit ConstrainedScatter(int nodes_per_cell) : expansion_(nodes_per_cell) {}

  std::vector<DofWeight>& node(int a) { return expansion_[a]; }

  template <typename MatrixSink, typename VectorSink>
  void apply(const ElementContribution& e, MatrixSink&& add_matrix,
             VectorSink&& add_vector) const {
    const int n = e.size;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double v = e.a(a, b);
        for (const DofWeight& i : expansion_[a]) {
          for (const DofWeight& j : expansion_[b]) {
            add_matrix(i.dof, j.dof, (i.weight * j.weight) * v);
          }
        }
      }
      for (const DofWeight& i : expansion_[a]) add_vector(i.dof, i.weight * e.rhs[a]);
    }
  }

 private:
  std::vector<std::vector<DofWeight>> expansion_;
};

// Aggregated space: rows and columns are the free (interior) DOFs.
SerialSystem assemble_serial(const StdSpace& space, const DofClassification& dofs,
                             const AgConstraints& constraints,
                             std::int64_t num_cells, const ElementFn& element);

// Unconstrained space over every DOF.
SerialSystem assemble_serial_std(const StdSpace& space, std::int64_t num_cells,
                                 const ElementFn& element);

}  // namespace agfem

#endif  // AGFEM_ASSEMBLY_HPP_
