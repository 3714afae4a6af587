// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/assembly.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "agfem/errors.hpp"

namespace agfem {

double nitsche_tau_agg(double h, double beta) {
  if (!(h > 0.0) || !(beta > 0.0)) {
    throw ContractViolation("nitsche_tau_agg: h and beta must be positive");
  }
  return beta / h;
}

StdPenalty penalty_from_matrices(std::span<const double> volume,
                                 std::span<const double> boundary, int n,
                                 double beta, double h) {
  using Eigen::MatrixXd;
  const MatrixXd V = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                    Eigen::Dynamic, Eigen::RowMajor>>(
      volume.data(), n, n);
  const MatrixXd B = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                    Eigen::Dynamic, Eigen::RowMajor>>(
      boundary.data(), n, n);
  // Orthonormal basis of the complement of the constant vector.
  const MatrixXd ones = MatrixXd::Ones(n, 1);
  const MatrixXd Qfull = Eigen::HouseholderQR<MatrixXd>(ones).householderQ();
  const MatrixXd Q = Qfull.rightCols(n - 1);
  MatrixXd Vr = Q.transpose() * V * Q;
  MatrixXd Br = Q.transpose() * B * Q;
  Vr = 0.5 * (Vr + Vr.transpose()).eval();
  Br = 0.5 * (Br + Br.transpose()).eval();

  StdPenalty out;
  const double floor = beta / h;
  Eigen::SelfAdjointEigenSolver<MatrixXd> vs(Vr, Eigen::EigenvaluesOnly);
  const double vmax = vs.eigenvalues().maxCoeff();
  const double vmin = vs.eigenvalues().minCoeff();
  // A numerically singular volume form is flagged; the eigensolve is still
  // attempted while it stays positive definite.
  out.unbounded = !(vmax > 0.0) || vmin <= 1e-13 * vmax;
  if (!(vmin > 0.0)) {
    out.lambda_max = std::numeric_limits<double>::infinity();
    out.tau = std::numeric_limits<double>::infinity();
    return out;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> gs(Br, Vr, Eigen::EigenvaluesOnly);
  if (gs.info() != Eigen::Success) {
    out.unbounded = true;
    out.lambda_max = std::numeric_limits<double>::infinity();
    out.tau = out.lambda_max;
    return out;
  }
  out.lambda_max = std::max(0.0, gs.eigenvalues().maxCoeff());
  out.tau = beta * out.lambda_max;
  if (out.tau < floor) {
    out.tau = floor;
    out.floored = true;
  }
  return out;
}

StdPenalty nitsche_tau_std(const LagrangeBasis& basis, const BoundingBox& box,
                           const CutQuadrature& quad, double beta, double h) {
  if (quad.boundary.size() == 0) {
    StdPenalty p;
    p.tau = beta / h;
    p.floored = true;
    return p;
  }
  const int n = basis.size();
  std::vector<double> V(n * n, 0.0);
  std::vector<double> B(n * n, 0.0);
  std::vector<Point> grad(n);
  for (std::size_t q = 0; q < quad.bulk.size(); ++q) {
    basis.gradients(box, quad.bulk.points[q], grad);
    const double w = quad.bulk.weights[q];
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) V[a * n + b] += w * dot(grad[a], grad[b]);
    }
  }
  std::vector<double> dn(n);
  for (std::size_t q = 0; q < quad.boundary.size(); ++q) {
    basis.gradients(box, quad.boundary.points[q], grad);
    const double w = quad.boundary.weights[q];
    for (int a = 0; a < n; ++a) dn[a] = dot(grad[a], quad.boundary.normals[q]);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) B[a * n + b] += w * dn[a] * dn[b];
    }
  }
  return penalty_from_matrices(V, B, n, beta, h);
}

ElementContribution element_poisson_nitsche(const LagrangeBasis& basis,
                                            const BoundingBox& box,
                                            const CutQuadrature& quad, double tau,
                                            const ScalarField& f,
                                            const ScalarField& g) {
  const int n = basis.size();
  ElementContribution e;
  e.size = n;
  e.matrix.assign(n * n, 0.0);
  e.rhs.assign(n, 0.0);
  std::vector<double> phi(n);
  std::vector<Point> grad(n);
  for (std::size_t q = 0; q < quad.bulk.size(); ++q) {
    const Point& x = quad.bulk.points[q];
    const double w = quad.bulk.weights[q];
    basis.values(box, x, phi);
    basis.gradients(box, x, grad);
    const double fx = f ? f(x) : 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) e.a(a, b) += w * dot(grad[a], grad[b]);
      e.rhs[a] += w * phi[a] * fx;
    }
  }
  std::vector<double> dn(n);
  for (std::size_t q = 0; q < quad.boundary.size(); ++q) {
    const Point& x = quad.boundary.points[q];
    const Point& nrm = quad.boundary.normals[q];
    const double w = quad.boundary.weights[q];
    basis.values(box, x, phi);
    basis.gradients(box, x, grad);
    for (int a = 0; a < n; ++a) dn[a] = dot(grad[a], nrm);
    const double gx = g ? g(x) : 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        e.a(a, b) += w * (tau * phi[a] * phi[b] - phi[a] * dn[b] - phi[b] * dn[a]);
      }
      e.rhs[a] += w * (tau * phi[a] * gx - dn[a] * gx);
    }
  }
  return e;
}

SerialSystem assemble_serial(const StdSpace& space, const DofClassification& dofs,
                             const AgConstraints& constraints,
                             std::int64_t num_cells, const ElementFn& element) {
  const std::int64_t n = dofs.num_interior();
  std::vector<Triplet> triplets;
  SerialSystem sys;
  sys.rhs.assign(n, 0.0);
  ConstrainedScatter scatter(space.nodes_per_cell);
  for (std::int64_t k = 0; k < num_cells; ++k) {
    const auto cell = space.dofs(k);
    for (int a = 0; a < space.nodes_per_cell; ++a) {
      auto& ex = scatter.node(a);
      ex.clear();
      const std::int64_t d = cell[a];
      if (dofs.interior_index[d] >= 0) {
        ex.push_back({dofs.interior_index[d], 1.0});
        continue;
      }
      const std::int64_t r =
          d < static_cast<std::int64_t>(constraints.row_of.size()) ? constraints.row_of[d] : -1;
      if (r < 0) {
        throw AssemblyError("DOF " + std::to_string(d) + " of cell " + std::to_string(k) +
                            " is neither free nor constrained");
      }
      const auto m = constraints.masters_of(r);
      const auto c = constraints.coefficients_of(r);
      for (std::size_t i = 0; i < m.size(); ++i) ex.push_back({m[i], c[i]});
    }
    scatter.apply(
        element(k),
        [&](std::int64_t i, std::int64_t j, double v) { triplets.push_back({i, j, v}); },
        [&](std::int64_t i, double v) { sys.rhs[i] += v; });
  }
  sys.matrix = CsrMatrix::from_triplets(n, n, triplets);
  return sys;
}

SerialSystem assemble_serial_std(const StdSpace& space, std::int64_t num_cells,
                                 const ElementFn& element) {
  const std::int64_t n = space.num_dofs;
  std::vector<Triplet> triplets;
  SerialSystem sys;
  sys.rhs.assign(n, 0.0);
  ConstrainedScatter scatter(space.nodes_per_cell);
  for (std::int64_t k = 0; k < num_cells; ++k) {
    const auto cell = space.dofs(k);
    for (int a = 0; a < space.nodes_per_cell; ++a) {
      scatter.node(a).assign(1, {cell[a], 1.0});
    }
    scatter.apply(
        element(k),
        [&](std::int64_t i, std::int64_t j, double v) { triplets.push_back({i, j, v}); },
        [&](std::int64_t i, double v) { sys.rhs[i] += v; });
  }
  sys.matrix = CsrMatrix::from_triplets(n, n, triplets);
  return sys;
}

}  // namespace agfem
