// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <random>

#include "agfem/errors.hpp"

namespace agfem {
namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Uniform values in [-1, 1) from the raw engine output, so the start vector
// does not depend on the standard library's distributions.
std::vector<double> start_vector(std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
  return v;
}

}  // namespace

LinearOperator serial_operator(const CsrMatrix& a) {
  LinearOperator op;
  op.size = a.rows();
  op.multiply = [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); };
  op.dot = [](std::span<const double> x, std::span<const double> y) { return dot(x, y); };
  op.diagonal = a.diagonal();
  return op;
}

LinearOperator distributed_operator(Runtime& rt,
                                    std::span<const DistributedSystem> systems,
                                    std::span<const MatvecPlan> plans) {
  LinearOperator op;
  op.size = systems.empty() ? 0 : systems.front().num_global;
  op.multiply = [&rt, systems, plans](std::span<const double> x, std::span<double> y) {
    distributed_multiply(rt, systems, plans, x, y);
  };
  op.dot = [&rt, systems](std::span<const double> x, std::span<const double> y) {
    return distributed_dot(rt, systems, x, y);
  };
  op.diagonal.assign(op.size, 0.0);
  for (const DistributedSystem& s : systems) {
    for (std::int64_t r = 0; r < s.num_owned(); ++r) {
      op.diagonal[s.owned_begin + r] = s.matrix.at(r, s.owned_begin + r);
    }
  }
  return op;
}

std::vector<double> pcg_jacobi(const LinearOperator& op, std::span<const double> b,
                               const SolverOptions& options, SolveReport& report) {
  const std::int64_t n = op.size;
  if (static_cast<std::int64_t>(b.size()) != n) {
    throw ContractViolation("pcg_jacobi: right-hand side size mismatch");
  }
  report = SolveReport{};
  std::vector<double> x(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);
  std::vector<double> inv(n);
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(op.diagonal[i] > 0.0)) {
      throw NumericalError("pcg_jacobi: non-positive diagonal entry at row " +
                           std::to_string(i));
    }
    inv[i] = 1.0 / op.diagonal[i];
  }
  const double bnorm = std::sqrt(op.dot(b, b));
  if (bnorm == 0.0) {
    report.residuals.push_back(0.0);
    report.converged = true;
    return x;
  }
  report.residuals.push_back(1.0);
  for (std::int64_t i = 0; i < n; ++i) z[i] = inv[i] * r[i];
  p = z;
  double rz = op.dot(r, z);
  std::vector<double> alphas;
  std::vector<double> betas;
  for (int it = 1; it <= options.maxit; ++it) {
    op.multiply(p, q);
    const double pq = op.dot(p, q);
    if (!(pq > 0.0)) break;  // not positive definite along p
    const double alpha = rz / pq;
    alphas.push_back(alpha);
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    const double rel = std::sqrt(op.dot(r, r)) / bnorm;
    report.residuals.push_back(rel);
    report.iterations = it;
    if (rel < options.rtol) {
      report.converged = true;
      break;
    }
    for (std::int64_t i = 0; i < n; ++i) z[i] = inv[i] * r[i];
    const double rz_next = op.dot(r, z);
    const double beta = rz_next / rz;
    betas.push_back(beta);
    for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_next;
  }
  if (!alphas.empty()) {
    const std::size_t m = alphas.size();
    std::vector<double> diag(m);
    std::vector<double> off(m > 0 ? m - 1 : 0);
    for (std::size_t j = 0; j < m; ++j) {
      diag[j] = 1.0 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
      if (j + 1 < m) off[j] = std::sqrt(betas[j]) / alphas[j];
    }
    const Spectrum s = tridiagonal_extremes(diag, off);
    report.ritz_min = s.lambda_min;
    report.ritz_max = s.lambda_max;
  }
  if (options.lanczos_steps > 0 && n > 0) {
    const Spectrum s = lanczos_extremes(op, options.lanczos_steps, options.seed);
    report.kappa = std::max(1.0, s.kappa());
  }
  return x;
}

std::vector<double> pcg_jacobi(const CsrMatrix& a, std::span<const double> b,
                               const SolverOptions& options, SolveReport& report) {
  return pcg_jacobi(serial_operator(a), b, options, report);
}

Spectrum tridiagonal_extremes(std::span<const double> diag,
                              std::span<const double> offdiag) {
  const auto m = static_cast<Eigen::Index>(diag.size());
  if (m == 0) throw ContractViolation("tridiagonal_extremes: empty matrix");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), m);
  Eigen::VectorXd e(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index i = 0; i + 1 < m; ++i) e[i] = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

Spectrum lanczos_extremes(const LinearOperator& op, int steps, std::uint64_t seed) {
  const std::int64_t n = op.size;
  const int m = static_cast<int>(std::min<std::int64_t>(steps, n));
  std::vector<std::vector<double>> basis;
  std::vector<double> v = start_vector(n, seed);
  const double vn = std::sqrt(op.dot(v, v));
  for (auto& x : v) x /= vn;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> w(n);
  for (int j = 0; j < m; ++j) {
    op.multiply(v, w);
    const double a = op.dot(w, v);
    alpha.push_back(a);
    basis.push_back(v);
    // Two Gram-Schmidt passes against every stored vector.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : basis) axpy(-op.dot(w, u), u, w);
    }
    const double b = std::sqrt(op.dot(w, w));
    if (j + 1 == m || b <= 1e-12 * std::abs(a)) break;
    beta.push_back(b);
    for (std::int64_t i = 0; i < n; ++i) v[i] = w[i] / b;
  }
  return tridiagonal_extremes(alpha, beta);
}

Spectrum dense_extremes(const CsrMatrix& a) {
  if (a.rows() > kDenseLimit) {
    throw Error("dense eigensolve limited to " + std::to_string(kDenseLimit) +
                " rows, matrix has " + std::to_string(a.rows()));
  }
  const std::vector<double> d = a.to_dense();
  const Eigen::MatrixXd m =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          d.data(), a.rows(), a.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double condition_estimate(const CsrMatrix& a, ConditionMethod method, int lanczos_steps,
                          std::uint64_t seed) {
  const Spectrum s = method == ConditionMethod::dense
                         ? dense_extremes(a)
                         : lanczos_extremes(serial_operator(a), lanczos_steps, seed);
  return s.kappa();
}

bool is_spd(const CsrMatrix& a) {
  if (a.rows() <= kDenseLimit) {
    const std::vector<double> d = a.to_dense();
    const Eigen::MatrixXd m =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(d.data(), a.rows(), a.cols());
    Eigen::LDLT<Eigen::MatrixXd> f(m);
    return f.info() == Eigen::Success && f.vectorD().size() > 0 &&
           f.vectorD().minCoeff() > 0.0;
  }
  std::vector<Eigen::Triplet<double>> t;
  const auto& ptr = a.row_ptr();
  for (std::int64_t r = 0; r < a.rows(); ++r) {
    for (std::int64_t i = ptr[r]; i < ptr[r + 1]; ++i) {
      t.emplace_back(r, a.col_idx()[i], a.values()[i]);
    }
  }
  Eigen::SparseMatrix<double> s(a.rows(), a.cols());
  s.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> f(s);
  return f.info() == Eigen::Success && f.vectorD().minCoeff() > 0.0;
}

ErrorNorms error_norms(const BackgroundGrid& grid, const CellClassification& cls,
                       const StdSpace& space, std::span<const double> nodal,
                       std::span<const CutQuadrature> quadratures,
                       const std::function<double(const Point&)>& u,
                       const VectorField& grad_u) {
  if (static_cast<std::int64_t>(quadratures.size()) != cls.num_active() ||
      static_cast<std::int64_t>(nodal.size()) != space.num_dofs) {
    throw ContractViolation("error_norms: one quadrature per active cell and one value "
                            "per DOF expected");
  }
  const LagrangeBasis basis(grid.dim(), space.order);
  const int n = basis.size();
  std::vector<double> phi(n);
  std::vector<Point> grad(n);
  double e0 = 0.0, e1 = 0.0, u0 = 0.0, u1 = 0.0;
  for (std::int64_t k = 0; k < cls.num_active(); ++k) {
    const auto dofs = space.dofs(k);
    const BoundingBox box = box_from_nodes(cell_nodes(space, k), grid.dim());
    const BulkRule& rule = quadratures[k].bulk;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      basis.values(box, x, phi);
      basis.gradients(box, x, grad);
      double uh = 0.0;
      Point guh{0.0, 0.0, 0.0};
      for (int a = 0; a < n; ++a) {
        uh += nodal[dofs[a]] * phi[a];
        guh = add(guh, scale(nodal[dofs[a]], grad[a]));
      }
      const double ux = u(x);
      const Point gx = grad_u(x);
      const Point ge = sub(gx, guh);
      const double w = rule.weights[q];
      e0 += w * (ux - uh) * (ux - uh);
      e1 += w * dot(ge, ge);
      u0 += w * ux * ux;
      u1 += w * dot(gx, gx);
    }
  }
  ErrorNorms out;
  out.exact_l2 = std::sqrt(u0);
  out.exact_h1 = std::sqrt(u1);
  out.absolute = !(out.exact_l2 > 0.0) || !(out.exact_h1 > 0.0);
  out.l2 = out.absolute ? std::sqrt(e0) : std::sqrt(e0) / out.exact_l2;
  out.h1 = out.absolute ? std::sqrt(e1) : std::sqrt(e1) / out.exact_h1;
  return out;
}

}  // namespace agfem
