// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

// Hand-rolled generators and independent oracles shared by the test
// binaries.

#ifndef AGFEM_TESTS_SUPPORT_HPP_
#define AGFEM_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "agfem/aggregation.hpp"
#include "agfem/classification.hpp"
#include "agfem/fe_space.hpp"
#include "agfem/geometry.hpp"
#include "agfem/level_set.hpp"

namespace agfem::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// A random domain on the unit box: a circle (sphere in 3D) or a half-plane
// through the middle region.
struct RandomDomain {
  LevelSetPtr ls;
  std::string label;
};

inline RandomDomain random_domain(Gen& g, int level, int dim = 2) {
  const double h = 1.0 / static_cast<double>(std::int64_t{1} << level);
  if (g.coin()) {
    const double r = g.uniform(std::max(0.2, 3.0 * h), 0.42);
    const double span = (0.5 - r) * 0.9;
    const Point c{g.uniform(0.5 - span, 0.5 + span), g.uniform(0.5 - span, 0.5 + span),
                  dim == 3 ? g.uniform(0.5 - span, 0.5 + span) : 0.0};
    return {std::make_shared<Sphere>(c, r),
            "circle c=(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
                std::to_string(c[2]) + ") r=" + std::to_string(r)};
  }
  Point n{g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0), dim == 3 ? g.uniform(-1.0, 1.0) : 0.0};
  if (norm(n) < 1e-3) n = {1.0, 0.3, 0.0};
  n = scale(1.0 / norm(n), n);
  const Point mid{0.5, 0.5, dim == 3 ? 0.5 : 0.0};
  const double c = dot(n, mid) + g.uniform(-0.2, 0.2);
  return {std::make_shared<HalfPlane>(n, c),
          "half-plane n=(" + std::to_string(n[0]) + "," + std::to_string(n[1]) + "," +
              std::to_string(n[2]) + ") c=" + std::to_string(c)};
}

// Domain covering the whole unit box.
inline LevelSetPtr everywhere() {
  return std::make_shared<HalfPlane>(Point{1.0, 0.0, 0.0}, 2.0);
}

inline LevelSetPtr vertical_cut(double x0) {
  return std::make_shared<HalfPlane>(Point{1.0, 0.0, 0.0}, x0);
}

// Multi-source breadth-first oracle for the serial aggregation: every
// interior cell is a source, a cell reached in layer L picks among its layer
// L-1 face neighbors (through active faces) the one whose root barycenter is
// closest, then the smaller id. Unreached cells keep root -1.
struct OracleResult {
  std::vector<std::int64_t> root;
  std::vector<std::int64_t> next;
  int layers = 0;
};

inline OracleResult bfs_oracle(const ActiveMesh& mesh) {
  const std::int64_t n = mesh.size();
  std::vector<int> layer(n, -1);
  std::deque<std::int64_t> queue;
  for (std::int64_t k = 0; k < n; ++k) {
    if (mesh.interior[k]) {
      layer[k] = 0;
      queue.push_back(k);
    }
  }
  while (!queue.empty()) {
    const std::int64_t k = queue.front();
    queue.pop_front();
    for (const FaceLink& f : mesh.neighbors[k]) {
      if (!f.active || layer[f.cell] >= 0) continue;
      layer[f.cell] = layer[k] + 1;
      queue.push_back(f.cell);
    }
  }
  OracleResult out;
  out.root.assign(n, -1);
  out.next.assign(n, -1);
  int max_layer = 0;
  for (int l : layer) max_layer = std::max(max_layer, l);
  for (int l = 0; l <= max_layer; ++l) {
    for (std::int64_t k = 0; k < n; ++k) {
      if (layer[k] != l) continue;
      if (l == 0) {
        out.root[k] = k;
        out.next[k] = k;
        continue;
      }
      std::tuple<double, std::int64_t> best{std::numeric_limits<double>::infinity(), -1};
      for (const FaceLink& f : mesh.neighbors[k]) {
        if (!f.active || layer[f.cell] != l - 1) continue;
        const Point d = sub(mesh.barycenter[k], mesh.barycenter[out.root[f.cell]]);
        const std::tuple<double, std::int64_t> cand{dot(d, d), f.cell};
        if (std::get<1>(best) < 0 || cand < best) best = cand;
      }
      out.next[k] = std::get<1>(best);
      out.root[k] = out.root[out.next[k]];
    }
  }
  out.layers = max_layer;
  return out;
}

// Constraint checks on one configuration: the largest deviation of a
// coefficient row sum from one, and the largest nodal error when the
// interior samples of each polynomial are prolongated.
struct ReproductionResult {
  std::int64_t constrained = 0;
  double row_sum_error = 0.0;
  double reproduction_error = 0.0;
};

using Polynomial = std::function<double(const Point&)>;

inline ReproductionResult check_reproduction(const BackgroundGrid& grid, const LevelSet& ls,
                                             int order,
                                             const std::vector<Polynomial>& polys) {
  const CellClassification cls = classify_cells(grid, ls);
  const ActiveMesh mesh = build_active_mesh(grid, ls, cls);
  const RootMap roots = aggregate_serial(mesh);
  const StdSpace space = build_std_space(grid, cls, order);
  const DofClassification dofs = classify_dofs(space, cls, &roots);
  const AgConstraints c = build_constraints_serial(space, dofs, roots);
  ReproductionResult r;
  r.constrained = c.size();
  for (std::int64_t row = 0; row < c.size(); ++row) {
    double s = 0.0;
    for (double w : c.coefficients_of(row)) s += w;
    r.row_sum_error = std::max(r.row_sum_error, std::abs(s - 1.0));
  }
  for (const Polynomial& p : polys) {
    std::vector<double> v(dofs.num_interior());
    for (std::int64_t i = 0; i < dofs.num_interior(); ++i) {
      v[i] = p(space.coords[dofs.interior_dofs[i]]);
    }
    const std::vector<double> full = prolongate(space, dofs, c, v);
    for (std::int64_t d = 0; d < space.num_dofs; ++d) {
      r.reproduction_error = std::max(r.reproduction_error, std::abs(full[d] - p(space.coords[d])));
    }
  }
  return r;
}

inline std::vector<Polynomial> bilinear_monomials() {
  return {[](const Point& x) { return x[0]; }, [](const Point& x) { return x[1]; },
          [](const Point& x) { return x[0] * x[1]; }};
}

}  // namespace agfem::testing

#endif  // AGFEM_TESTS_SUPPORT_HPP_
