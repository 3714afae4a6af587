// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/parallel_aggregation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "agfem/aggregation.hpp"
#include "agfem/errors.hpp"

namespace agfem {
namespace {

struct GhostUpdate {
  std::int64_t cell;
  std::int64_t root;
  std::int64_t next;
  Point root_barycenter;
  std::int64_t root_owner;
};

class AggregationProcess {
 public:
  AggregationProcess(const SubdomainMesh& mesh, DistRootMap& map)
      : mesh_(mesh), map_(map), dirty_(mesh.size(), 0) {
    const std::int64_t n = mesh.size();
    map_.root.assign(n, -1);
    map_.root_owner.assign(n, -1);
    map_.next.assign(n, -1);
    map_.root_barycenter.assign(n, Point{});
  }

  void init() {
    for (std::int64_t l = 0; l < mesh_.num_local; ++l) {
      if (!mesh_.interior[l]) continue;
      assign(l, mesh_.global[l], mesh_.id, mesh_.global[l], mesh_.barycenter[l]);
    }
  }

  void apply(std::span<const Message> inbox,
             const ParallelAggregationOptions& options) {
    for (const Message& m : inbox) {
      ByteReader in(m.payload);
      for (const auto& u : in.get_vector<GhostUpdate>()) {
        const std::int64_t l = mesh_.local_of(u.cell);
        if (l < mesh_.num_local) {
          throw ProtocolError("ghost update for a cell that is not a ghost",
                              mesh_.id, m.source, u.cell);
        }
        std::int64_t root = u.root;
        if (options.on_ghost_update) options.on_ghost_update(mesh_.id, u.cell, root);
        map_.root[l] = root;
        map_.root_owner[l] = static_cast<int>(u.root_owner);
        map_.next[l] = u.next;
        map_.root_barycenter[l] = u.root_barycenter;
      }
    }
  }

  // One Jacobi sweep over local cut cells; returns the number assigned.
  std::int64_t sweep() {
    const std::int64_t n = mesh_.size();
    std::vector<char> touched(n);
    for (std::int64_t l = 0; l < n; ++l) touched[l] = map_.root[l] >= 0;
    std::int64_t assigned = 0;
    for (std::int64_t l = 0; l < mesh_.num_local; ++l) {
      if (touched[l]) continue;
      std::int64_t best = -1;
      std::int64_t best_id = -1;
      double best_d2 = 0.0;
      for (const FaceLink& f : mesh_.faces[l]) {
        if (!f.active || !touched[f.cell]) continue;
        const double d2 =
            distance_squared(mesh_.barycenter[l], map_.root_barycenter[f.cell]);
        const std::int64_t id = mesh_.global[f.cell];
        if (better_candidate(d2, id, best_d2, best_id)) {
          best = f.cell;
          best_id = id;
          best_d2 = d2;
        }
      }
      if (best < 0) continue;
      assign(l, map_.root[best], map_.root_owner[best], best_id,
             map_.root_barycenter[best]);
      ++assigned;
    }
    return assigned;
  }

  void post_updates(ProcessContext& ctx) {
    for (std::size_t t = 0; t < mesh_.neighbors.size(); ++t) {
      std::vector<GhostUpdate> updates;
      for (std::int64_t l : mesh_.shared[t]) {
        if (!dirty_[l]) continue;
        updates.push_back({mesh_.global[l], map_.root[l], map_.next[l],
                           map_.root_barycenter[l], map_.root_owner[l]});
      }
      if (updates.empty()) continue;
      ByteWriter out;
      out.put_span<GhostUpdate>(updates);
      ctx.post(mesh_.neighbors[t], out.take());
    }
    std::fill(dirty_.begin(), dirty_.end(), 0);
  }

  bool complete() const {
    return std::all_of(map_.root.begin(), map_.root.end(),
                       [](std::int64_t r) { return r >= 0; });
  }

  std::vector<std::int64_t> orphans() const {
    std::vector<std::int64_t> out;
    for (std::int64_t l = 0; l < mesh_.num_local; ++l) {
      if (map_.root[l] < 0) out.push_back(mesh_.global[l]);
    }
    return out;
  }

 private:
  void assign(std::int64_t l, std::int64_t root, int owner, std::int64_t next,
              const Point& bary) {
    map_.root[l] = root;
    map_.root_owner[l] = owner;
    map_.next[l] = next;
    map_.root_barycenter[l] = bary;
    dirty_[l] = 1;
  }

  const SubdomainMesh& mesh_;
  DistRootMap& map_;
  std::vector<char> dirty_;
};

struct PathTuple {
  std::int64_t first;
  std::int64_t next;
  std::int32_t origin;
  std::int32_t hops;
};

}  // namespace

DistAggregation aggregate_parallel(Runtime& rt,
                                   std::span<const SubdomainMesh> meshes,
                                   const ParallelAggregationOptions& options) {
  const int parts = rt.size();
  if (static_cast<int>(meshes.size()) != parts) {
    throw ContractViolation("aggregate_parallel: one mesh per process expected");
  }
  DistAggregation out;
  out.maps.resize(parts);
  std::vector<AggregationProcess> procs;
  procs.reserve(parts);
  for (int s = 0; s < parts; ++s) procs.emplace_back(meshes[s], out.maps[s]);

  rt.superstep("aggregation.init", [&](ProcessContext& ctx) {
    auto& p = procs[ctx.rank()];
    p.init();
    p.post_updates(ctx);
  });
  while (true) {
    rt.superstep("aggregation.sweep", [&](ProcessContext& ctx) {
      auto& p = procs[ctx.rank()];
      p.apply(ctx.inbox(), options);
      const std::int64_t assigned = p.sweep();
      p.post_updates(ctx);
      ctx.contribute_and(p.complete());
      ctx.contribute_sum(assigned);
    });
    ++out.rounds;
    if (rt.and_result()) break;
    if (rt.sum_result() == 0) {
      std::vector<std::int64_t> orphans;
      for (const auto& p : procs) {
        const auto o = p.orphans();
        orphans.insert(orphans.end(), o.begin(), o.end());
      }
      std::sort(orphans.begin(), orphans.end());
      std::string ids;
      for (std::size_t i = 0; i < orphans.size() && i < 16; ++i) {
        ids += (i ? "," : "") + std::to_string(orphans[i]);
      }
      throw AggregationStalledError(
          "parallel aggregation stalled; cells without a root: " + ids,
          std::move(orphans));
    }
  }
  return out;
}

std::int64_t RootImportPlan::slot_of(std::int64_t root) const {
  const auto it = std::lower_bound(remote_roots.begin(), remote_roots.end(), root);
  if (it == remote_roots.end() || *it != root) return -1;
  return it - remote_roots.begin();
}

void build_direct_plan(const SubdomainMesh& mesh, const DistRootMap& map,
                       RootImportPlan& plan) {
  std::map<int, std::set<std::int64_t>> recv;
  std::set<std::int64_t> all;
  for (std::int64_t l = 0; l < mesh.size(); ++l) {
    if (mesh.interior[l]) continue;
    const int owner = map.root_owner[l];
    if (owner == mesh.id) continue;
    recv[owner].insert(map.root[l]);
    all.insert(map.root[l]);
  }
  plan.recv_from.clear();
  plan.recv.clear();
  for (const auto& [s, roots] : recv) {
    plan.recv_from.push_back(s);
    plan.recv.emplace_back(roots.begin(), roots.end());
  }
  plan.remote_roots.assign(all.begin(), all.end());
}

void build_inverse_plan(Runtime& rt, std::span<const SubdomainMesh> meshes,
                        std::span<const DistRootMap> maps,
                        std::span<RootImportPlan> plans) {
  const int parts = rt.size();
  std::int64_t total_cells = 0;
  for (const auto& m : meshes) total_cells += m.num_local;

  std::vector<std::map<int, std::set<std::int64_t>>> send(parts);

  // Advances tuples through local cut cells; delivers those that reach a
  // local root and forwards the rest to the owner of their next cell.
  auto forward = [&](ProcessContext& ctx, std::vector<PathTuple> tuples) {
    const int s = ctx.rank();
    const SubdomainMesh& mesh = meshes[s];
    const DistRootMap& map = maps[s];
    std::map<int, std::vector<PathTuple>> out;
    for (PathTuple t : tuples) {
      while (true) {
        const std::int64_t l = mesh.local_of(t.next);
        if (l < 0) {
          throw ProtocolError("path tuple reached a cell that is not locally relevant",
                              s, -1, t.next);
        }
        if (!mesh.is_local(l)) {
          out[mesh.owner[l]].push_back(t);
          break;
        }
        if (mesh.interior[l]) {
          if (t.origin != s) send[s][t.origin].insert(t.next);
          break;
        }
        t.next = map.next[l];
        if (++t.hops > total_cells) {
          throw CycleError("path tuple starting at cell " + std::to_string(t.first) +
                           " exceeded the global cell count");
        }
      }
    }
    for (auto& [dest, batch] : out) {
      ByteWriter w;
      w.put_span<PathTuple>(batch);
      ctx.post(dest, w.take());
    }
    ctx.contribute_and(out.empty());
  };

  rt.superstep("inverse-plan.start", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const SubdomainMesh& mesh = meshes[s];
    const DistRootMap& map = maps[s];
    std::vector<PathTuple> tuples;
    for (std::int64_t l = 0; l < mesh.size(); ++l) {
      if (mesh.interior[l]) continue;
      const std::int64_t k = mesh.global[l];
      tuples.push_back({k, mesh.is_local(l) ? map.next[l] : k, s, 0});
    }
    forward(ctx, std::move(tuples));
  });
  while (!rt.and_result()) {
    rt.superstep("inverse-plan.forward", [&](ProcessContext& ctx) {
      std::vector<PathTuple> tuples;
      for (const Message& m : ctx.inbox()) {
        ByteReader in(m.payload);
        const auto batch = in.get_vector<PathTuple>();
        tuples.insert(tuples.end(), batch.begin(), batch.end());
      }
      forward(ctx, std::move(tuples));
    });
  }

  for (int s = 0; s < parts; ++s) {
    plans[s].send_to.clear();
    plans[s].send.clear();
    for (const auto& [t, roots] : send[s]) {
      plans[s].send_to.push_back(t);
      plans[s].send.emplace_back(roots.begin(), roots.end());
    }
  }
}

std::vector<RootImportPlan> build_import_plans(Runtime& rt,
                                               std::span<const SubdomainMesh> meshes,
                                               std::span<const DistRootMap> maps) {
  std::vector<RootImportPlan> plans(meshes.size());
  for (std::size_t s = 0; s < meshes.size(); ++s) {
    build_direct_plan(meshes[s], maps[s], plans[s]);
  }
  build_inverse_plan(rt, meshes, maps, plans);
  return plans;
}

std::vector<RootDataBuffer> import_root_data(Runtime& rt,
                                             std::span<const SubdomainMesh> meshes,
                                             std::span<const RootImportPlan> plans,
                                             int nodes_per_cell,
                                             const CellDataProvider& provider) {
  const int parts = rt.size();
  const std::size_t per_node = sizeof(Point) + sizeof(std::int64_t);
  const std::size_t per_cell = per_node * nodes_per_cell;

  rt.superstep("import-roots.send", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const RootImportPlan& plan = plans[s];
    for (std::size_t t = 0; t < plan.send_to.size(); ++t) {
      ByteWriter w;
      for (std::int64_t k : plan.send[t]) {
        const std::int64_t l = meshes[s].local_of(k);
        if (l < 0 || !meshes[s].is_local(l)) {
          throw ProtocolError("asked to export a root that is not owned", s,
                              plan.send_to[t], k);
        }
        const CellNodeData data = provider(s, l);
        for (int a = 0; a < nodes_per_cell; ++a) {
          w.put(data.coords[a]);
          w.put(data.dofs[a]);
        }
      }
      ctx.post_routed(plan.send_to[t], w.take());
    }
  });

  std::vector<RootDataBuffer> buffers(parts);
  rt.superstep("import-roots.receive", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const RootImportPlan& plan = plans[s];
    RootDataBuffer& buf = buffers[s];
    buf.nodes_per_cell = nodes_per_cell;
    const std::size_t slots = plan.remote_roots.size() * nodes_per_cell;
    buf.coords.assign(slots, Point{});
    buf.dofs.assign(slots, -1);
    std::vector<char> seen(plan.recv_from.size(), 0);
    for (const Message& m : ctx.inbox()) {
      const auto it =
          std::lower_bound(plan.recv_from.begin(), plan.recv_from.end(), m.source);
      if (it == plan.recv_from.end() || *it != m.source) {
        throw ProtocolError("unexpected root data", s, m.source, -1);
      }
      const auto t = static_cast<std::size_t>(it - plan.recv_from.begin());
      seen[t] = 1;
      const auto& roots = plan.recv[t];
      if (m.payload.size() != roots.size() * per_cell) {
        const std::size_t full = m.payload.size() / per_cell;
        const std::int64_t k = roots.empty() ? -1 : roots[std::min(full, roots.size() - 1)];
        throw ProtocolError("root data length mismatch from subdomain " +
                                std::to_string(m.source) + " at cell " +
                                std::to_string(k),
                            s, m.source, k);
      }
      ByteReader in(m.payload);
      for (std::int64_t k : roots) {
        const std::int64_t z = plan.slot_of(k);
        for (int a = 0; a < nodes_per_cell; ++a) {
          buf.coords[z * nodes_per_cell + a] = in.get<Point>();
          buf.dofs[z * nodes_per_cell + a] = in.get<std::int64_t>();
        }
      }
    }
    for (std::size_t t = 0; t < seen.size(); ++t) {
      if (!seen[t]) {
        const std::int64_t k = plan.recv[t].empty() ? -1 : plan.recv[t].front();
        throw ProtocolError("no root data received from subdomain " +
                                std::to_string(plan.recv_from[t]),
                            s, plan.recv_from[t], k);
      }
    }
  });
  return buffers;
}

}  // namespace agfem
