// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/dist_fe_space.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_map>

#include "agfem/errors.hpp"

namespace agfem {
namespace {

struct NumberingState {
  std::unordered_map<std::uint64_t, std::int64_t> local_of_key;
  std::vector<char> touched_by_interior;
  std::vector<int> min_owner;
  std::vector<char> owned;
  std::int64_t num_owned = 0;
};

std::int64_t find_key(const NumberingState& st, std::uint64_t key) {
  const auto it = st.local_of_key.find(key);
  return it == st.local_of_key.end() ? -1 : it->second;
}

// Local ids of all locally relevant cells sorted by global id.
std::vector<std::int64_t> by_global_id(const SubdomainMesh& mesh) {
  std::vector<std::int64_t> order(mesh.size());
  std::merge(
      mesh.global.begin(), mesh.global.begin() + mesh.num_local,
      mesh.global.begin() + mesh.num_local, mesh.global.end(), order.begin());
  for (auto& k : order) k = mesh.local_of(k);
  return order;
}

void post_cell_ids(ProcessContext& ctx, const SubdomainMesh& mesh,
                   const DistStdSpace& space) {
  for (std::size_t t = 0; t < mesh.neighbors.size(); ++t) {
    ByteWriter w;
    w.put<std::uint64_t>(mesh.shared[t].size());
    for (std::int64_t l : mesh.shared[t]) {
      w.put(mesh.global[l]);
      for (std::int64_t g : space.global_dofs(l)) w.put(g);
    }
    ctx.post(mesh.neighbors[t], w.take());
  }
}

void apply_cell_ids(ProcessContext& ctx, const SubdomainMesh& mesh,
                    const NumberingState& st, const NodeLattice& nodes,
                    const LagrangeBasis& basis, DistStdSpace& space) {
  const int npc = basis.size();
  for (const Message& m : ctx.inbox()) {
    ByteReader in(m.payload);
    const auto count = in.get<std::uint64_t>();
    for (std::uint64_t c = 0; c < count; ++c) {
      const auto k = in.get<std::int64_t>();
      const std::int64_t l = mesh.local_of(k);
      if (l < mesh.num_local) {
        throw ProtocolError("cell-wise ids received for a non-ghost cell",
                            mesh.id, m.source, k);
      }
      for (int a = 0; a < npc; ++a) {
        const auto g = in.get<std::int64_t>();
        space.cell_global_dofs[l * npc + a] = g;
        if (g < 0) continue;
        const std::int64_t j = find_key(st, nodes.key(mesh.lattice[l], basis.multi_index(a)));
        if (j < 0) continue;
        if (space.global_dof[j] < 0) {
          space.global_dof[j] = g;
        } else if (space.global_dof[j] != g) {
          throw ProtocolError("conflicting global ids for a shared node", mesh.id,
                              m.source, k);
        }
      }
    }
  }
}

void fill_local_cells(const SubdomainMesh& mesh, DistStdSpace& space) {
  const int npc = space.nodes_per_cell;
  for (std::int64_t l = 0; l < mesh.num_local; ++l) {
    for (int a = 0; a < npc; ++a) {
      space.cell_global_dofs[l * npc + a] =
          space.global_dof[space.cell_local_dofs[l * npc + a]];
    }
  }
}

}  // namespace

std::vector<DistStdSpace> number_dofs_distributed(Runtime& rt,
                                                  const BackgroundGrid& grid,
                                                  std::span<const SubdomainMesh> meshes,
                                                  int order) {
  const int parts = rt.size();
  const LagrangeBasis basis(grid.dim(), order);
  const NodeLattice nodes(grid, order);
  const int npc = basis.size();
  std::vector<DistStdSpace> spaces(parts);
  std::vector<NumberingState> states(parts);

  rt.superstep("dofs.ownership", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const SubdomainMesh& mesh = meshes[s];
    DistStdSpace& space = spaces[s];
    NumberingState& st = states[s];
    space.subdomain = s;
    space.dim = grid.dim();
    space.order = order;
    space.nodes_per_cell = npc;
    space.cell_local_dofs.resize(mesh.num_local * npc);
    for (std::int64_t l = 0; l < mesh.num_local; ++l) {
      for (int a = 0; a < npc; ++a) {
        const auto m = basis.multi_index(a);
        const std::uint64_t key = nodes.key(mesh.lattice[l], m);
        auto [it, inserted] = st.local_of_key.try_emplace(key, space.num_local_dofs());
        if (inserted) {
          space.coords.push_back(nodes.coordinate(grid, mesh.lattice[l], m));
          space.node_key.push_back(key);
        }
        space.cell_local_dofs[l * npc + a] = it->second;
      }
    }
    const std::int64_t nj = space.num_local_dofs();
    st.touched_by_interior.assign(nj, 0);
    st.min_owner.assign(nj, std::numeric_limits<int>::max());
    st.owned.assign(nj, 0);
    space.owner_cell.assign(nj, -1);
    space.global_dof.assign(nj, -1);
    space.cell_global_dofs.assign(mesh.size() * npc, -1);
    // Every cell incident to a node of an owned cell is locally relevant, so
    // these reductions see the complete node-to-cell incidence.
    for (std::int64_t l : by_global_id(mesh)) {
      for (int a = 0; a < npc; ++a) {
        const std::int64_t j = find_key(st, nodes.key(mesh.lattice[l], basis.multi_index(a)));
        if (j < 0) continue;
        if (space.owner_cell[j] < 0) space.owner_cell[j] = l;
        st.min_owner[j] = std::min(st.min_owner[j], mesh.owner[l]);
        if (mesh.interior[l]) st.touched_by_interior[j] = 1;
      }
    }
    for (std::int64_t j = 0; j < nj; ++j) {
      st.owned[j] = st.touched_by_interior[j] && st.min_owner[j] == s;
      st.num_owned += st.owned[j];
    }
    ctx.contribute_sum(st.num_owned);
  });

  rt.superstep("dofs.number", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const SubdomainMesh& mesh = meshes[s];
    DistStdSpace& space = spaces[s];
    NumberingState& st = states[s];
    space.owned_begin = ctx.scan_result();
    space.owned_end = space.owned_begin + st.num_owned;
    space.num_global = ctx.sum_result();
    std::int64_t next = space.owned_begin;
    for (std::int64_t l : by_global_id(mesh)) {
      if (!mesh.interior[l]) continue;
      for (int a = 0; a < npc; ++a) {
        const std::int64_t j = find_key(st, nodes.key(mesh.lattice[l], basis.multi_index(a)));
        if (j < 0 || !st.owned[j] || space.global_dof[j] >= 0) continue;
        space.global_dof[j] = next++;
      }
    }
    if (next != space.owned_end) {
      throw ProtocolError("owned node count changed while numbering", s, s, -1);
    }
    fill_local_cells(mesh, space);
    post_cell_ids(ctx, mesh, space);
  });

  rt.superstep("dofs.exchange-owned", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    apply_cell_ids(ctx, meshes[s], states[s], nodes, basis, spaces[s]);
    fill_local_cells(meshes[s], spaces[s]);
    post_cell_ids(ctx, meshes[s], spaces[s]);
  });

  rt.superstep("dofs.exchange-ghost", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const SubdomainMesh& mesh = meshes[s];
    DistStdSpace& space = spaces[s];
    const NumberingState& st = states[s];
    apply_cell_ids(ctx, mesh, st, nodes, basis, space);
    for (std::int64_t j = 0; j < space.num_local_dofs(); ++j) {
      if (st.touched_by_interior[j] != (space.global_dof[j] >= 0)) {
        throw ProtocolError("unresolved global id for local node " + std::to_string(j),
                            s, st.min_owner[j], -1);
      }
    }
  });
  return spaces;
}

CellNodeData cell_node_data(const BackgroundGrid& grid, const DistStdSpace& space,
                            const SubdomainMesh& mesh, std::int64_t local_cell) {
  const LagrangeBasis basis(space.dim, space.order);
  const NodeLattice nodes(grid, space.order);
  CellNodeData out;
  for (int a = 0; a < basis.size(); ++a) {
    out.coords.push_back(
        nodes.coordinate(grid, mesh.lattice[local_cell], basis.multi_index(a)));
    out.dofs.push_back(space.cell_global_dofs[local_cell * basis.size() + a]);
  }
  return out;
}

AgConstraints build_constraints_distributed(const BackgroundGrid& grid,
                                            const DistStdSpace& space,
                                            const SubdomainMesh& mesh,
                                            const DistRootMap& map,
                                            const RootImportPlan& plan,
                                            const RootDataBuffer& buffer) {
  const LagrangeBasis basis(space.dim, space.order);
  const int npc = basis.size();
  AgConstraints out;
  out.row_of.assign(space.num_local_dofs(), -1);
  std::vector<std::int64_t> masters(npc);
  std::vector<double> coeffs(npc);
  for (std::int64_t j = 0; j < space.num_local_dofs(); ++j) {
    if (space.is_free(j)) continue;
    const std::int64_t k = map.root[space.owner_cell[j]];
    const std::int64_t lk = mesh.local_of(k);
    BoundingBox box;
    if (lk >= 0) {
      const CellNodeData data = cell_node_data(grid, space, mesh, lk);
      std::copy(data.dofs.begin(), data.dofs.end(), masters.begin());
      box = box_from_nodes(data.coords, space.dim);
    } else {
      const std::int64_t z = plan.slot_of(k);
      if (z < 0) {
        throw MissingImportError("root " + std::to_string(k) + " of local DOF " +
                                     std::to_string(j) + " on subdomain " +
                                     std::to_string(mesh.id) +
                                     " is neither local nor imported",
                                 mesh.id, j, k);
      }
      const auto g = buffer.cell_dofs(z);
      std::copy(g.begin(), g.end(), masters.begin());
      box = box_from_nodes(buffer.cell_coords(z), space.dim);
    }
    for (std::int64_t m : masters) {
      if (m < 0) {
        throw AssemblyError("root cell " + std::to_string(k) +
                            " has a node without a global id");
      }
    }
    basis.values(box, space.coords[j], coeffs);
    out.add_row(j, masters, coeffs);
  }
  return out;
}

}  // namespace agfem
