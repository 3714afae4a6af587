// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <vector>

#include "agfem/dist_fe_space.hpp"
#include "agfem/errors.hpp"
#include "agfem/fe_space.hpp"
#include "agfem/problem.hpp"
#include "agfem/runtime.hpp"
#include "support.hpp"

namespace agfem {
namespace {

using testing::Gen;

struct Serial {
  BackgroundGrid grid;
  CellClassification cls;
  ActiveMesh mesh;
  RootMap roots;
  StdSpace space;
  DofClassification dofs;
  AgConstraints constraints;
};

Serial make_serial(int level, const LevelSet& ls, int order = 1) {
  Serial s{BackgroundGrid(BoundingBox::unit(), level, 2), {}, {}, {}, {}, {}, {}};
  s.cls = classify_cells(s.grid, ls);
  s.mesh = build_active_mesh(s.grid, ls, s.cls);
  s.roots = aggregate_serial(s.mesh);
  s.space = build_std_space(s.grid, s.cls, order);
  s.dofs = classify_dofs(s.space, s.cls, &s.roots);
  s.constraints = build_constraints_serial(s.space, s.dofs, s.roots);
  return s;
}

std::int64_t dof_at(const Serial& s, double x, double y) {
  for (std::int64_t d = 0; d < s.space.num_dofs; ++d) {
    if (std::abs(s.space.coords[d][0] - x) < 1e-14 && std::abs(s.space.coords[d][1] - y) < 1e-14) {
      return d;
    }
  }
  return -1;
}

TEST(LagrangeBasis, NodalAndPartitionOfUnity) {
  Gen gen(4);
  for (int dim = 2; dim <= 3; ++dim) {
    for (int order = 1; order <= 3; ++order) {
      const LagrangeBasis basis(dim, order);
      EXPECT_EQ(basis.size(), static_cast<int>(std::pow(order + 1, dim)));
      BoundingBox box;
      box.origin = {0.25, -0.5, 0.125};
      box.extent = {0.5, 0.25, 0.75};
      std::vector<double> v(basis.size());
      for (int a = 0; a < basis.size(); ++a) {
        const auto mi = basis.multi_index(a);
        Point x{0.0, 0.0, 0.0};
        for (int i = 0; i < dim; ++i) {
          x[i] = box.origin[i] + box.extent[i] * mi[i] / static_cast<double>(order);
        }
        basis.values(box, x, v);
        for (int b = 0; b < basis.size(); ++b) {
          EXPECT_NEAR(v[b], a == b ? 1.0 : 0.0, 1e-13) << "dim " << dim << " q " << order;
        }
      }
      std::vector<Point> g(basis.size());
      for (int t = 0; t < 20; ++t) {
        // Includes points outside the box (extrapolation).
        const Point x{gen.uniform(-1.0, 2.0), gen.uniform(-1.0, 2.0), gen.uniform(-1.0, 2.0)};
        basis.values(box, x, v);
        // Far outside the box the individual values grow large; the
        // tolerance follows their magnitude.
        double mag = 0.0;
        for (double y : v) mag += std::abs(y);
        EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-14 * mag);
        basis.gradients(box, x, g);
        Point gs{0.0, 0.0, 0.0};
        double gmag = 0.0;
        for (const Point& p : g) {
          gs = add(gs, p);
          gmag += norm(p);
        }
        EXPECT_NEAR(norm(gs), 0.0, 1e-14 * gmag);
      }
    }
  }
  EXPECT_THROW(LagrangeBasis(4, 1), ContractViolation);
  EXPECT_THROW(LagrangeBasis(2, 0), ContractViolation);
}

TEST(LagrangeBasis, GradientsMatchDifferenceQuotients) {
  const LagrangeBasis basis(2, 2);
  const BoundingBox box{{0.1, 0.2, 0.0}, {0.3, 0.4, 1.0}};
  const Point x{0.17, 0.33, 0.0};
  std::vector<Point> g(basis.size());
  basis.gradients(box, x, g);
  std::vector<double> vp(basis.size()), vm(basis.size());
  const double e = 1e-6;
  for (int axis = 0; axis < 2; ++axis) {
    Point xp = x, xm = x;
    xp[axis] += e;
    xm[axis] -= e;
    basis.values(box, xp, vp);
    basis.values(box, xm, vm);
    for (int a = 0; a < basis.size(); ++a) {
      EXPECT_NEAR(g[a][axis], (vp[a] - vm[a]) / (2 * e), 1e-7);
    }
  }
}

TEST(LagrangeBasis, ExtrapolatedHat) {
  // Root cell [0, 0.25]^2, node (0.5, 0).
  const LagrangeBasis basis(2, 1);
  const BoundingBox box{{0.0, 0.0, 0.0}, {0.25, 0.25, 1.0}};
  std::vector<double> v(4);
  basis.values(box, {0.5, 0.0, 0.0}, v);
  EXPECT_NEAR(v[0], -1.0, 1e-15);
  EXPECT_NEAR(v[1], 2.0, 1e-15);
  EXPECT_NEAR(v[2], 0.0, 1e-15);
  EXPECT_NEAR(v[3], 0.0, 1e-15);
}

TEST(StdSpace, CountsAndConformity) {
  const BackgroundGrid g(BoundingBox::unit(), 1, 2);
  // Only the bottom row is active; its top vertices sit on the interface.
  const HalfPlane ls({0.0, 1.0, 0.0}, 0.5);
  const CellClassification cls = classify_cells(g, ls);
  ASSERT_EQ(cls.num_active(), 2);
  const StdSpace s1 = build_std_space(g, cls, 1);
  EXPECT_EQ(s1.num_dofs, 6);
  const StdSpace s2 = build_std_space(g, cls, 2);
  EXPECT_EQ(s2.num_dofs, 15);
  // Shared nodes have one id and one coordinate.
  std::set<std::uint64_t> keys(s2.node_key.begin(), s2.node_key.end());
  EXPECT_EQ(static_cast<std::int64_t>(keys.size()), s2.num_dofs);
}

TEST(DofClassification, AllInteriorHasNoExteriorDofs) {
  const Serial s = make_serial(3, *testing::everywhere());
  EXPECT_TRUE(s.dofs.exterior_dofs.empty());
  EXPECT_EQ(s.dofs.num_interior(), 81);
  EXPECT_EQ(s.constraints.size(), 0);
  std::vector<double> v(81);
  std::iota(v.begin(), v.end(), 0.0);
  const std::vector<double> full = prolongate(s.space, s.dofs, s.constraints, v);
  for (std::int64_t i = 0; i < 81; ++i) EXPECT_EQ(full[s.dofs.interior_dofs[i]], v[i]);
}

TEST(DofClassification, ExteriorNodesOfTheCutColumn) {
  const Serial s = make_serial(2, *testing::vertical_cut(0.6));
  ASSERT_EQ(s.dofs.exterior_dofs.size(), 5u);
  for (std::int64_t d : s.dofs.exterior_dofs) {
    EXPECT_DOUBLE_EQ(s.space.coords[d][0], 0.75);
    // Owner is the smaller of the cut cells containing the node.
    std::int64_t smallest = -1;
    for (std::int64_t k = 0; k < s.cls.num_active(); ++k) {
      const auto cd = s.space.dofs(k);
      if (std::find(cd.begin(), cd.end(), d) != cd.end()) {
        smallest = smallest < 0 ? k : std::min(smallest, k);
      }
    }
    EXPECT_EQ(s.dofs.owner_cell[d], smallest);
  }
  EXPECT_EQ(s.dofs.num_interior() + 5, s.space.num_dofs);
}

TEST(Constraints, ExtrapolationCoefficients) {
  // Column 0 interior, column 1 cut; node (0.5, 0) hangs off root (0, 0).
  const Serial s = make_serial(2, *testing::vertical_cut(0.3));
  const std::int64_t node = dof_at(s, 0.5, 0.0);
  ASSERT_GE(node, 0);
  const std::int64_t row = s.constraints.row_of[node];
  ASSERT_GE(row, 0);
  std::map<std::pair<double, double>, double> by_corner;
  const auto m = s.constraints.masters_of(row);
  const auto c = s.constraints.coefficients_of(row);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Point& x = s.space.coords[s.dofs.interior_dofs[m[i]]];
    by_corner[{x[0], x[1]}] += c[i];
  }
  EXPECT_NEAR(by_corner[std::make_pair(0.0, 0.0)], -1.0, 1e-15);
  EXPECT_NEAR(by_corner[std::make_pair(0.25, 0.0)], 2.0, 1e-15);
  EXPECT_NEAR(by_corner[std::make_pair(0.0, 0.25)], 0.0, 1e-15);
  EXPECT_NEAR(by_corner[std::make_pair(0.25, 0.25)], 0.0, 1e-15);
}

TEST(Constraints, ConstantsAndPolynomialsAreReproduced) {
  Gen gen(314);
  for (int t = 0; t < 60; ++t) {
    const int level = gen.integer(2, 5);
    const auto dom = testing::random_domain(gen, level);
    const BackgroundGrid g(BoundingBox::unit(), level, 2);
    if (classify_cells(g, *dom.ls).interior_cells.empty()) continue;
    std::vector<testing::Polynomial> polys = testing::bilinear_monomials();
    polys.push_back([](const Point&) { return 1.0; });
    const int order = t % 4 == 3 ? 2 : 1;
    if (order == 2) {
      polys.push_back([](const Point& x) { return x[0] * x[0]; });
      polys.push_back([](const Point& x) { return x[0] * x[0] * x[1] * x[1]; });
    }
    const auto r = testing::check_reproduction(g, *dom.ls, order, polys);
    EXPECT_LE(r.row_sum_error, 1e-12) << dom.label;
    EXPECT_LE(r.reproduction_error, 1e-12) << dom.label << " q=" << order;
  }
}

TEST(Constraints, ReproductionInThreeDimensions) {
  const BackgroundGrid g(BoundingBox::unit(), 3, 3);
  const Sphere ls({0.48, 0.52, 0.5}, 0.37);
  std::vector<testing::Polynomial> polys = testing::bilinear_monomials();
  polys.push_back([](const Point& x) { return x[0] * x[1] * x[2]; });
  const auto r = testing::check_reproduction(g, ls, 1, polys);
  EXPECT_GT(r.constrained, 0);
  EXPECT_LE(r.row_sum_error, 1e-12);
  EXPECT_LE(r.reproduction_error, 1e-12);
}

TEST(Constraints, ProlongateChecksTheSize) {
  const Serial s = make_serial(2, *testing::vertical_cut(0.6));
  EXPECT_THROW(prolongate(s.space, s.dofs, s.constraints, std::vector<double>(3)),
               ContractViolation);
}

Discretization circle(int level, const std::string& geometry = "circle") {
  ProblemConfig c;
  c.geometry = geometry;
  c.level = level;
  return discretize(c);
}

DistributedRun distribute(const Discretization& d, Runtime& rt, int parts) {
  return run_distributed(d, rt, partition_weighted_sfc(d.cls, 10.0, parts));
}

TEST(DistributedNumbering, SingleProcessNumbersEveryInteriorNode) {
  const Discretization d = circle(4);
  Runtime rt(1);
  const DistributedRun run = distribute(d, rt, 1);
  const DistStdSpace& s = run.spaces[0];
  EXPECT_EQ(s.owned_begin, 0);
  EXPECT_EQ(s.owned_end, d.dofs.num_interior());
  EXPECT_EQ(s.num_global, d.dofs.num_interior());
  std::set<std::int64_t> ids;
  for (std::int64_t j = 0; j < s.num_local_dofs(); ++j) {
    if (s.is_free(j)) ids.insert(s.global_dof[j]);
  }
  EXPECT_EQ(static_cast<std::int64_t>(ids.size()), d.dofs.num_interior());
  EXPECT_EQ(*ids.begin(), 0);
}

TEST(DistributedNumbering, OwnedRangesTileTheGlobalIds) {
  for (int parts : {2, 4, 7, 16}) {
    const Discretization d = circle(5, "offset-circle");
    Runtime rt(parts);
    const DistributedRun run = distribute(d, rt, parts);
    std::int64_t next = 0;
    std::unordered_map<std::uint64_t, std::int64_t> id_of_key;
    for (const DistStdSpace& s : run.spaces) {
      EXPECT_EQ(s.owned_begin, next);
      next = s.owned_end;
      EXPECT_EQ(s.num_global, d.dofs.num_interior());
      for (std::int64_t j = 0; j < s.num_local_dofs(); ++j) {
        if (!s.is_free(j)) continue;
        // A node has one global id on every subdomain that sees it.
        const auto [it, fresh] = id_of_key.emplace(s.node_key[j], s.global_dof[j]);
        ASSERT_EQ(it->second, s.global_dof[j]) << "P=" << parts;
      }
    }
    EXPECT_EQ(next, d.dofs.num_interior());
    EXPECT_EQ(static_cast<std::int64_t>(id_of_key.size()), d.dofs.num_interior());
  }
}

TEST(DistributedNumbering, InterfaceNodesBelongToTheSmallerSubdomain) {
  const Discretization d = circle(4);
  Runtime rt(4);
  const DistributedRun run = distribute(d, rt, 4);
  std::map<std::uint64_t, int> first_seen;  // node -> smallest subdomain touching it
  for (int s = 0; s < 4; ++s) {
    const DistStdSpace& sp = run.spaces[s];
    for (std::int64_t l = 0; l < run.meshes[s].num_local; ++l) {
      if (!run.meshes[s].interior[l]) continue;
      for (std::int64_t j : sp.local_dofs(l)) first_seen.emplace(sp.node_key[j], s);
    }
  }
  for (int s = 0; s < 4; ++s) {
    const DistStdSpace& sp = run.spaces[s];
    for (std::int64_t j = 0; j < sp.num_local_dofs(); ++j) {
      if (!sp.is_free(j)) continue;
      const bool owned = sp.global_dof[j] >= sp.owned_begin && sp.global_dof[j] < sp.owned_end;
      EXPECT_EQ(owned, first_seen.at(sp.node_key[j]) == s);
    }
  }
}

TEST(DistributedConstraints, EqualSerialConstraintsPerNode) {
  for (int parts : {1, 2, 4, 16}) {
    const Discretization d = circle(5, parts % 2 ? "circle" : "offset-circle");
    Runtime rt(parts, {2, static_cast<std::uint64_t>(parts)});
    const DistributedRun run = distribute(d, rt, parts);
    std::unordered_map<std::uint64_t, std::int64_t> global_of_key;
    for (const DistStdSpace& s : run.spaces) {
      for (std::int64_t j = 0; j < s.num_local_dofs(); ++j) {
        if (s.is_free(j)) global_of_key[s.node_key[j]] = s.global_dof[j];
      }
    }
    std::unordered_map<std::uint64_t, std::int64_t> serial_dof;
    for (std::int64_t i = 0; i < d.space.num_dofs; ++i) serial_dof[d.space.node_key[i]] = i;
    std::int64_t rows = 0;
    for (int s = 0; s < parts; ++s) {
      const AgConstraints& c = run.constraints[s];
      const DistStdSpace& sp = run.spaces[s];
      for (std::int64_t row = 0; row < c.size(); ++row) {
        const std::int64_t j = c.constrained[row];
        const std::int64_t dof = serial_dof.at(sp.node_key[j]);
        const std::int64_t sr = d.constraints.row_of[dof];
        ASSERT_GE(sr, 0);
        // Owner cells agree as global active ids.
        EXPECT_EQ(run.meshes[s].global[sp.owner_cell[j]], d.dofs.owner_cell[dof]);
        std::map<std::int64_t, double> want, got;
        const auto sm = d.constraints.masters_of(sr);
        const auto sc = d.constraints.coefficients_of(sr);
        for (std::size_t i = 0; i < sm.size(); ++i) {
          want[global_of_key.at(d.space.node_key[d.dofs.interior_dofs[sm[i]]])] += sc[i];
        }
        const auto m = c.masters_of(row);
        const auto w = c.coefficients_of(row);
        double sum = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
          got[m[i]] += w[i];
          sum += w[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        ASSERT_EQ(want.size(), got.size());
        for (const auto& [k, v] : want) {
          ASSERT_TRUE(got.count(k)) << "P=" << parts;
          EXPECT_NEAR(got[k], v, 1e-13) << "P=" << parts;
        }
        ++rows;
      }
    }
    // Every serial constraint appears at least once.
    EXPECT_GE(rows, d.constraints.size());
  }
}

}  // namespace
}  // namespace agfem
