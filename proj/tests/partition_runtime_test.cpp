// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "agfem/aggregation.hpp"
#include "agfem/classification.hpp"
#include "agfem/errors.hpp"
#include "agfem/geometry.hpp"
#include "agfem/partition.hpp"
#include "agfem/runtime.hpp"
#include "support.hpp"

namespace agfem {
namespace {

using testing::Gen;

Bytes bytes_of(std::int64_t v) {
  ByteWriter w;
  w.put(v);
  return w.take();
}

std::int64_t value_of(const Message& m) {
  ByteReader r(m.payload);
  return r.get<std::int64_t>();
}

struct Layout {
  BackgroundGrid grid;
  CellClassification cls;
  ActiveMesh mesh;
};

Layout all_active(int level) {
  Layout s{BackgroundGrid(BoundingBox::unit(), level, 2), {}, {}};
  const LevelSetPtr ls = testing::everywhere();
  s.cls = classify_cells(s.grid, *ls);
  s.mesh = build_active_mesh(s.grid, *ls, s.cls);
  return s;
}

TEST(SplitWeighted, UniformWeights) {
  const std::vector<double> w(16, 1.0);
  EXPECT_EQ(split_weighted(w, 4), (std::vector<std::int64_t>{0, 4, 8, 12, 16}));
  EXPECT_EQ(split_weighted(w, 1), (std::vector<std::int64_t>{0, 16}));
}

TEST(SplitWeighted, SplitsAtTheMatchingPrefix) {
  const std::vector<double> w{10, 10, 1, 1, 10, 10, 1, 1};
  EXPECT_EQ(split_weighted(w, 2), (std::vector<std::int64_t>{0, 4, 8}));
}

TEST(SplitWeighted, RejectsBadInput) {
  const std::vector<double> w{1.0, 2.0};
  EXPECT_THROW(split_weighted(w, 0), ContractViolation);
  EXPECT_THROW(split_weighted(w, 3), ContractViolation);
  const std::vector<double> z{1.0, 0.0};
  EXPECT_THROW(split_weighted(z, 1), ContractViolation);
}

TEST(SplitWeighted, SpreadIsBoundedByTheLargestWeight) {
  Gen gen(17);
  for (int parts : {2, 3, 4, 7, 16}) {
    for (int t = 0; t < 60; ++t) {
      const int n = gen.integer(parts, 400);
      std::vector<double> w(n);
      for (double& x : w) {
        x = gen.coin() ? gen.uniform(0.1, 1.0) : (gen.coin() ? 10.0 : 1.0);
      }
      const auto b = split_weighted(w, parts);
      ASSERT_EQ(static_cast<int>(b.size()), parts + 1);
      ASSERT_EQ(b.front(), 0);
      ASSERT_EQ(b.back(), n);
      double lo = 1e300, hi = -1e300;
      for (int p = 0; p < parts; ++p) {
        ASSERT_LT(b[p], b[p + 1]) << "empty part";
        const double s = std::accumulate(w.begin() + b[p], w.begin() + b[p + 1], 0.0);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      EXPECT_LE(hi - lo, *std::max_element(w.begin(), w.end()) + 1e-12)
          << "parts " << parts << " n " << n;
    }
  }
}

TEST(Partition, SingleSubdomainOwnsEverything) {
  const Layout s = all_active(3);
  const Partition p = partition_weighted_sfc(s.cls, 10.0, 1);
  EXPECT_TRUE(std::all_of(p.owner.begin(), p.owner.end(), [](int o) { return o == 0; }));
  const auto meshes = build_subdomain_meshes(s.grid, s.cls, s.mesh, p);
  ASSERT_EQ(meshes.size(), 1u);
  EXPECT_EQ(meshes[0].num_ghost(), 0);
  EXPECT_TRUE(meshes[0].neighbors.empty());
}

TEST(Partition, UnitWeightsBalanceTotalCells) {
  const BackgroundGrid g(BoundingBox::unit(), 5, 2);
  const CellClassification cls = classify_cells(g, Sphere({0.5, 0.5, 0.0}, 0.3));
  for (int parts : {2, 3, 4, 7}) {
    const Partition p = partition_weighted_sfc(cls, 1.0, parts);
    std::vector<int> count(parts, 0);
    for (int o : p.owner) ++count[o];
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    EXPECT_LE(*hi - *lo, 1) << "parts " << parts;
  }
}

TEST(Partition, OwnersFollowTheMortonCurve) {
  const BackgroundGrid g(BoundingBox::unit(), 4, 2);
  const CellClassification cls = classify_cells(g, Sphere({0.4, 0.6, 0.0}, 0.35));
  const Partition p = partition_weighted_sfc(cls, 10.0, 5);
  for (std::size_t k = 1; k < p.owner.size(); ++k) {
    EXPECT_GE(p.owner[k], p.owner[k - 1]);
  }
}

TEST(SubdomainMesh, LeftRightHalves) {
  const Layout s = all_active(2);
  std::vector<int> owner(16);
  for (std::uint64_t k = 0; k < 16; ++k) owner[k] = s.grid.lattice(k)[0] < 2 ? 0 : 1;
  const auto meshes =
      build_subdomain_meshes(s.grid, s.cls, s.mesh, partition_from_owners(s.cls, owner, 2));
  for (const SubdomainMesh& m : meshes) {
    EXPECT_EQ(m.num_local, 8);
    EXPECT_EQ(m.num_ghost(), 4);
    EXPECT_EQ(m.neighbors, std::vector<int>{1 - m.id});
    for (std::int64_t l = m.num_local; l < m.size(); ++l) {
      EXPECT_EQ(m.lattice[l][0], m.id == 0 ? 2 : 1);
    }
  }
}

TEST(SubdomainMesh, Quadrants) {
  const Layout s = all_active(2);
  std::vector<int> owner(16);
  for (std::uint64_t k = 0; k < 16; ++k) {
    const Lattice c = s.grid.lattice(k);
    owner[k] = static_cast<int>((c[0] / 2) + 2 * (c[1] / 2));
  }
  const auto meshes =
      build_subdomain_meshes(s.grid, s.cls, s.mesh, partition_from_owners(s.cls, owner, 4));
  for (const SubdomainMesh& m : meshes) {
    EXPECT_EQ(m.num_local, 4);
    EXPECT_EQ(m.num_ghost(), 5);
    EXPECT_EQ(m.neighbors.size(), 3u);
  }
}

TEST(SubdomainMesh, CoverAndGhostSymmetry) {
  Gen gen(23);
  for (int t = 0; t < 20; ++t) {
    const int level = gen.integer(3, 5);
    const auto dom = testing::random_domain(gen, level);
    const BackgroundGrid g(BoundingBox::unit(), level, 2);
    const CellClassification cls = classify_cells(g, *dom.ls);
    if (cls.num_active() < 16) continue;
    const ActiveMesh mesh = build_active_mesh(g, *dom.ls, cls);
    const int parts = gen.integer(2, 8);
    const Partition p = partition_weighted_sfc(cls, gen.uniform(1.0, 20.0), parts);
    const auto meshes = build_subdomain_meshes(g, cls, mesh, p);
    std::vector<int> local_count(cls.num_active(), 0);
    for (const SubdomainMesh& m : meshes) {
      for (std::int64_t l = 0; l < m.size(); ++l) {
        ASSERT_EQ(m.local_of(m.global[l]), l);
        ASSERT_EQ(m.owner[l], p.active_owner[m.global[l]]);
        if (m.is_local(l)) {
          ++local_count[m.global[l]];
          ASSERT_EQ(m.owner[l], m.id);
        } else {
          // The ghost's owner lists this subdomain as a neighbor and shares
          // the cell with it.
          const SubdomainMesh& o = meshes[m.owner[l]];
          const int idx = o.neighbor_index(m.id);
          ASSERT_GE(idx, 0) << dom.label;
          const std::int64_t ol = o.local_of(m.global[l]);
          const auto& list = o.shared[idx];
          ASSERT_NE(std::find(list.begin(), list.end(), ol), list.end()) << dom.label;
        }
      }
      for (int t2 : m.neighbors) {
        ASSERT_GE(meshes[t2].neighbor_index(m.id), 0);
      }
    }
    for (int c : local_count) ASSERT_EQ(c, 1) << dom.label;
  }
}

TEST(Runtime, SingleProcessExchangeIsANoOp) {
  Runtime rt(1);
  const auto got = neighbor_exchange(rt, "noop", {Outbox{}});
  ASSERT_EQ(got.size(), 1u);
  EXPECT_TRUE(got[0].empty());
  EXPECT_TRUE(rt.trace().empty());
}

TEST(Runtime, TwoProcessesSwapRecords) {
  Runtime rt(2);
  std::vector<Outbox> out(2);
  out[0].emplace_back(1, bytes_of(10));
  out[1].emplace_back(0, bytes_of(20));
  const auto got = neighbor_exchange(rt, "swap", std::move(out));
  ASSERT_EQ(got[0].size(), 1u);
  ASSERT_EQ(got[1].size(), 1u);
  EXPECT_EQ(value_of(got[0][0]), 20);
  EXPECT_EQ(got[0][0].source, 1);
  EXPECT_EQ(value_of(got[1][0]), 10);
}

TEST(Runtime, AsymmetricPost) {
  Runtime rt(2);
  std::vector<Outbox> out(2);
  out[0].emplace_back(1, bytes_of(7));
  const auto got = neighbor_exchange(rt, "one-way", std::move(out));
  EXPECT_TRUE(got[0].empty());
  ASSERT_EQ(got[1].size(), 1u);
  EXPECT_EQ(value_of(got[1][0]), 7);
}

TEST(Runtime, RoutedMessagesReachNonNeighbors) {
  Runtime rt(3);
  rt.set_neighbors({{1}, {0, 2}, {1}});
  EXPECT_FALSE(rt.are_neighbors(0, 2));
  std::vector<Outbox> out(3);
  out[0].emplace_back(2, bytes_of(5));
  EXPECT_THROW(neighbor_exchange(rt, "bad", out), ContractViolation);
  Runtime rt2(3);
  rt2.set_neighbors({{1}, {0, 2}, {1}});
  const auto got = routed_exchange(rt2, "routed", std::move(out));
  ASSERT_EQ(got[2].size(), 1u);
  EXPECT_EQ(value_of(got[2][0]), 5);
  ASSERT_EQ(rt2.trace().size(), 1u);
  EXPECT_TRUE(rt2.trace()[0].routed);
  EXPECT_EQ(rt2.trace()[0].phase, "routed");
}

TEST(Runtime, InboxIsOrderedBySenderThenPostingOrder) {
  Runtime rt(4, {4, 99});
  rt.superstep("fan-in", [](ProcessContext& ctx) {
    if (ctx.rank() == 0) return;
    for (int i = 0; i < 3; ++i) ctx.post(0, bytes_of(ctx.rank() * 10 + i));
  });
  const auto inbox = rt.inbox(0);
  ASSERT_EQ(inbox.size(), 9u);
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    const int src = 1 + static_cast<int>(i) / 3;
    EXPECT_EQ(inbox[i].source, src);
    EXPECT_EQ(value_of(inbox[i]), src * 10 + static_cast<int>(i) % 3);
  }
}

TEST(Runtime, Collectives) {
  Runtime rt(3);
  EXPECT_TRUE(reduce_logical_and(rt, {true, true, true}));
  EXPECT_FALSE(reduce_logical_and(rt, {true, false, true}));
  const std::vector<std::int64_t> v{3, 5, 2};
  EXPECT_EQ(exclusive_scan_sum(rt, v), (std::vector<std::int64_t>{0, 3, 8}));
  EXPECT_EQ(rt.sum_result(), 10);
}

TEST(Runtime, PartialCollectiveIsADeadlock) {
  Runtime rt(3);
  EXPECT_THROW(rt.superstep("half-and",
                            [](ProcessContext& ctx) {
                              if (ctx.rank() != 1) ctx.contribute_and(true);
                            }),
               DeadlockError);
  // The runtime stays usable.
  EXPECT_TRUE(reduce_logical_and(rt, {true, true, true}));
}

TEST(Runtime, TruncatedMessageIsAProtocolError) {
  const Bytes b = bytes_of(1);
  ByteReader r(b);
  r.get<std::int32_t>();
  EXPECT_THROW(r.get<std::int64_t>(), ProtocolError);
}

// Random traffic over a few supersteps; everything observable is recorded.
struct Observation {
  std::vector<std::vector<std::pair<int, std::int64_t>>> received;
  std::vector<double> real_sums;
  std::vector<std::int64_t> scans;
  std::vector<std::tuple<std::int64_t, int, int, std::size_t, bool>> trace;

  bool operator==(const Observation&) const = default;
};

Observation run_traffic(int procs, ExecutionPolicy policy, std::uint64_t pattern) {
  Runtime rt(procs, policy);
  Observation obs;
  obs.received.resize(procs);
  for (int step = 0; step < 6; ++step) {
    rt.superstep("traffic", [&](ProcessContext& ctx) {
      for (const Message& m : ctx.inbox()) {
        obs.received[ctx.rank()].emplace_back(m.source, value_of(m));
      }
      Gen g(pattern * 1000 + step * 100 + ctx.rank());
      const int n = g.integer(0, 4);
      for (int i = 0; i < n; ++i) {
        ctx.post_routed(g.integer(0, procs - 1), bytes_of(g.integer(0, 1 << 20)));
      }
      ctx.contribute_real(g.uniform(-1.0, 1.0) * 1e-3 + 1.0 / (ctx.rank() + 1));
      ctx.contribute_sum(g.integer(0, 9));
    });
    obs.real_sums.push_back(rt.real_sum_result());
    for (std::int64_t v : rt.scan_result()) obs.scans.push_back(v);
  }
  for (const TraceEntry& e : rt.trace()) {
    obs.trace.emplace_back(e.superstep, e.source, e.dest, e.bytes, e.routed);
  }
  return obs;
}

TEST(Runtime, ResultsDoNotDependOnSchedulingOrThreads) {
  for (std::uint64_t pattern = 1; pattern <= 4; ++pattern) {
    const Observation ref = run_traffic(7, {1, 0}, pattern);
    for (const ExecutionPolicy& p :
         {ExecutionPolicy{1, 3}, ExecutionPolicy{2, 0}, ExecutionPolicy{4, 12345},
          ExecutionPolicy{8, 7}}) {
      const Observation o = run_traffic(7, p, pattern);
      EXPECT_TRUE(o == ref) << "threads " << p.threads << " seed " << p.order_seed;
    }
  }
}

}  // namespace
}  // namespace agfem
