// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_SOLVER_HPP_
#define AGFEM_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "agfem/dist_assembly.hpp"
#include "agfem/fe_space.hpp"
#include "agfem/quadrature.hpp"
#include "agfem/runtime.hpp"
#include "agfem/sparse.hpp"

namespace agfem {

struct SolveReport {
  int iterations = 0;
  std::vector<double> residuals;  // ||r_i|| / ||b||, starting at i = 0
  bool converged = false;
  // Extreme Ritz values of the Jacobi-preconditioned operator, from the CG
  // coefficients.
  double ritz_min = 0.0;
  double ritz_max = 0.0;
  // Condition number estimate of the system matrix itself.
  double kappa = 1.0;
};

struct SolverOptions {
  double rtol = 1e-6;
  int maxit = 500;
  // Lanczos steps for the condition estimate; 0 skips it.
  int lanczos_steps = 200;
  std::uint64_t seed = 1;
};

// The operations a Krylov method needs; vectors always have global length.
struct LinearOperator {
  std::int64_t size = 0;
  std::function<void(std::span<const double>, std::span<double>)> multiply;
  std::function<double(std::span<const double>, std::span<const double>)> dot;
  std::vector<double> diagonal;
};

LinearOperator serial_operator(const CsrMatrix& a);
// Operator over distributed systems; each application runs supersteps.
LinearOperator distributed_operator(Runtime& rt,
                                    std::span<const DistributedSystem> systems,
                                    std::span<const MatvecPlan> plans);

// Conjugate gradients with diagonal preconditioning. Stops when the
// unpreconditioned residual satisfies ||r|| / ||b|| < rtol. Non-convergence
// is reported, not thrown.
std::vector<double> pcg_jacobi(const LinearOperator& op, std::span<const double> b,
                               const SolverOptions& options, SolveReport& report);

std::vector<double> pcg_jacobi(const CsrMatrix& a, std::span<const double> b,
                               const SolverOptions& options, SolveReport& report);

struct Spectrum {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa() const { return lambda_max / lambda_min; }
};

// Lanczos with full reorthogonalization from a seeded start vector.
Spectrum lanczos_extremes(const LinearOperator& op, int steps, std::uint64_t seed);

// Extreme eigenvalues of the tridiagonal matrix with the given diagonal and
// off-diagonal.
Spectrum tridiagonal_extremes(std::span<const double> diag,
                              std::span<const double> offdiag);

enum class ConditionMethod { lanczos, dense };

inline constexpr std::int64_t kDenseLimit = 2000;

// kappa = lambda_max / lambda_min. The dense method refuses matrices above
// kDenseLimit rows.
double condition_estimate(const CsrMatrix& a, ConditionMethod method,
                          int lanczos_steps = 300, std::uint64_t seed = 1);
Spectrum dense_extremes(const CsrMatrix& a);

// Positivity check through a pivoted LDL^T factorization.
bool is_spd(const CsrMatrix& a);

struct ErrorNorms {
  double l2 = 0.0;       // relative unless `absolute`
  double h1 = 0.0;       // relative H1 seminorm unless `absolute`
  double exact_l2 = 0.0;
  double exact_h1 = 0.0;
  bool absolute = false;  // an exact norm vanished
};

using VectorField = std::function<Point(const Point&)>;

// Errors of the full nodal field `nodal` (one value per DOF of `space`)
// against u and grad u, integrated with one quadrature per active cell.
ErrorNorms error_norms(const BackgroundGrid& grid, const CellClassification& cls,
                       const StdSpace& space, std::span<const double> nodal,
                       std::span<const CutQuadrature> quadratures,
                       const std::function<double(const Point&)>& u,
                       const VectorField& grad_u);

}  // namespace agfem

#endif  // AGFEM_SOLVER_HPP_
