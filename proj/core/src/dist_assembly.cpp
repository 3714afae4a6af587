// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/dist_assembly.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "agfem/errors.hpp"

namespace agfem {
namespace {

// First global id of every subdomain, plus the total at the end.
std::vector<std::int64_t> ownership_ranges(std::span<const DistStdSpace> spaces) {
  std::vector<std::int64_t> r;
  for (const DistStdSpace& s : spaces) r.push_back(s.owned_begin);
  r.push_back(spaces.empty() ? 0 : spaces.back().owned_end);
  return r;
}

std::vector<std::int64_t> ownership_ranges(std::span<const DistributedSystem> systems) {
  std::vector<std::int64_t> r;
  for (const DistributedSystem& s : systems) r.push_back(s.owned_begin);
  r.push_back(systems.empty() ? 0 : systems.back().owned_end);
  return r;
}

int owner_of(const std::vector<std::int64_t>& ranges, std::int64_t g) {
  const auto it = std::upper_bound(ranges.begin(), ranges.end() - 1, g);
  return static_cast<int>(it - ranges.begin()) - 1;
}

struct VectorEntry {
  std::int64_t row;
  double value;
};

struct Staged {
  std::vector<Triplet> matrix;
  std::vector<VectorEntry> vector;
};

}  // namespace

std::vector<DistributedSystem> assemble_distributed(
    Runtime& rt, std::span<const SubdomainMesh> meshes,
    std::span<const DistStdSpace> spaces,
    std::span<const AgConstraints> constraints, const DistElementFn& element) {
  const int parts = rt.size();
  const std::vector<std::int64_t> ranges = ownership_ranges(spaces);
  std::vector<DistributedSystem> systems(parts);
  std::vector<std::vector<Triplet>> local(parts);

  rt.superstep("assemble.local", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const SubdomainMesh& mesh = meshes[s];
    const DistStdSpace& space = spaces[s];
    const AgConstraints& cons = constraints[s];
    DistributedSystem& sys = systems[s];
    sys.subdomain = s;
    sys.owned_begin = space.owned_begin;
    sys.owned_end = space.owned_end;
    sys.num_global = space.num_global;
    sys.rhs.assign(sys.num_owned(), 0.0);
    std::vector<Staged> out(parts);
    ConstrainedScatter scatter(space.nodes_per_cell);
    auto check = [&](std::int64_t g) {
      if (g < 0 || g >= space.num_global) {
        throw AssemblyError("contribution to global id " + std::to_string(g) +
                            " outside the free DOFs on subdomain " + std::to_string(s));
      }
    };
    for (std::int64_t l = 0; l < mesh.num_local; ++l) {
      const auto cell = space.local_dofs(l);
      for (int a = 0; a < space.nodes_per_cell; ++a) {
        auto& ex = scatter.node(a);
        ex.clear();
        const std::int64_t j = cell[a];
        if (space.is_free(j)) {
          ex.push_back({space.global_dof[j], 1.0});
          continue;
        }
        const std::int64_t r = cons.row_of[j];
        if (r < 0) {
          throw AssemblyError("local DOF " + std::to_string(j) + " of subdomain " +
                              std::to_string(s) + " is neither free nor constrained");
        }
        const auto m = cons.masters_of(r);
        const auto c = cons.coefficients_of(r);
        for (std::size_t i = 0; i < m.size(); ++i) ex.push_back({m[i], c[i]});
      }
      scatter.apply(
          element(s, l),
          [&](std::int64_t i, std::int64_t jj, double v) {
            check(i);
            check(jj);
            if (i >= sys.owned_begin && i < sys.owned_end) {
              local[s].push_back({i - sys.owned_begin, jj, v});
            } else {
              out[owner_of(ranges, i)].matrix.push_back({i, jj, v});
            }
          },
          [&](std::int64_t i, double v) {
            check(i);
            if (i >= sys.owned_begin && i < sys.owned_end) {
              sys.rhs[i - sys.owned_begin] += v;
            } else {
              out[owner_of(ranges, i)].vector.push_back({i, v});
            }
          });
    }
    for (int t = 0; t < parts; ++t) {
      if (out[t].matrix.empty() && out[t].vector.empty()) continue;
      sys.staged_matrix += static_cast<std::int64_t>(out[t].matrix.size());
      sys.staged_vector += static_cast<std::int64_t>(out[t].vector.size());
      ByteWriter w;
      w.put_span<Triplet>(out[t].matrix);
      w.put_span<VectorEntry>(out[t].vector);
      ctx.post_routed(t, w.take());
    }
  });

  rt.superstep("assemble.finalize", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    DistributedSystem& sys = systems[s];
    for (const Message& m : ctx.inbox()) {
      ByteReader in(m.payload);
      for (const Triplet& t : in.get_vector<Triplet>()) {
        if (t.row < sys.owned_begin || t.row >= sys.owned_end) {
          throw ProtocolError("received a row owned elsewhere", s, m.source, t.row);
        }
        local[s].push_back({t.row - sys.owned_begin, t.col, t.value});
      }
      for (const auto& [row, v] : in.get_vector<VectorEntry>()) {
        if (row < sys.owned_begin || row >= sys.owned_end) {
          throw ProtocolError("received a vector entry owned elsewhere", s, m.source, row);
        }
        sys.rhs[row - sys.owned_begin] += v;
      }
    }
    sys.matrix = CsrMatrix::from_triplets(sys.num_owned(), sys.num_global, local[s]);
    local[s].clear();
    local[s].shrink_to_fit();
    sys.assembled = true;
  });
  return systems;
}

SerialSystem gather_system(std::span<const DistributedSystem> systems) {
  const std::int64_t n = systems.empty() ? 0 : systems.front().num_global;
  std::vector<Triplet> t;
  SerialSystem out;
  out.rhs.assign(n, 0.0);
  for (const DistributedSystem& s : systems) {
    const auto& ptr = s.matrix.row_ptr();
    const auto& col = s.matrix.col_idx();
    const auto& val = s.matrix.values();
    for (std::int64_t r = 0; r < s.num_owned(); ++r) {
      for (std::int64_t i = ptr[r]; i < ptr[r + 1]; ++i) {
        t.push_back({s.owned_begin + r, col[i], val[i]});
      }
      out.rhs[s.owned_begin + r] = s.rhs[r];
    }
  }
  out.matrix = CsrMatrix::from_triplets(n, n, t);
  return out;
}

std::vector<std::uint64_t> global_node_keys(std::span<const DistStdSpace> spaces) {
  const std::int64_t n = spaces.empty() ? 0 : spaces.front().num_global;
  std::vector<std::uint64_t> keys(n, 0);
  for (const DistStdSpace& s : spaces) {
    for (std::int64_t j = 0; j < s.num_local_dofs(); ++j) {
      const std::int64_t g = s.global_dof[j];
      if (g >= s.owned_begin && g < s.owned_end) keys[g] = s.node_key[j];
    }
  }
  return keys;
}

std::vector<MatvecPlan> build_matvec_plans(std::span<const DistributedSystem> systems) {
  const std::vector<std::int64_t> ranges = ownership_ranges(systems);
  std::vector<MatvecPlan> plans(systems.size());
  for (std::size_t s = 0; s < systems.size(); ++s) {
    const DistributedSystem& sys = systems[s];
    std::map<int, std::vector<std::int64_t>> recv;
    std::map<int, std::vector<std::int64_t>> send;
    const auto& ptr = sys.matrix.row_ptr();
    const auto& col = sys.matrix.col_idx();
    for (std::int64_t r = 0; r < sys.num_owned(); ++r) {
      for (std::int64_t i = ptr[r]; i < ptr[r + 1]; ++i) {
        const std::int64_t c = col[i];
        if (c >= sys.owned_begin && c < sys.owned_end) continue;
        const int t = owner_of(ranges, c);
        recv[t].push_back(c);
        // The pattern is symmetric, so the owner of c needs row r's entry.
        send[t].push_back(sys.owned_begin + r);
      }
    }
    MatvecPlan& p = plans[s];
    for (auto& [t, ids] : recv) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      p.recv_from.push_back(t);
      p.recv.push_back(std::move(ids));
    }
    for (auto& [t, ids] : send) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      p.send_to.push_back(t);
      p.send.push_back(std::move(ids));
    }
  }
  return plans;
}

void distributed_multiply(Runtime& rt, std::span<const DistributedSystem> systems,
                          std::span<const MatvecPlan> plans,
                          std::span<const double> x, std::span<double> y) {
  rt.superstep("matvec.send", [&](ProcessContext& ctx) {
    const MatvecPlan& p = plans[ctx.rank()];
    for (std::size_t t = 0; t < p.send_to.size(); ++t) {
      std::vector<double> v;
      v.reserve(p.send[t].size());
      for (std::int64_t g : p.send[t]) v.push_back(x[g]);
      ByteWriter w;
      w.put_span<double>(v);
      ctx.post_routed(p.send_to[t], w.take());
    }
  });
  rt.superstep("matvec.apply", [&](ProcessContext& ctx) {
    const int s = ctx.rank();
    const DistributedSystem& sys = systems[s];
    const MatvecPlan& p = plans[s];
    std::vector<std::pair<std::int64_t, double>> ghost;
    for (const Message& m : ctx.inbox()) {
      const auto it = std::lower_bound(p.recv_from.begin(), p.recv_from.end(), m.source);
      if (it == p.recv_from.end() || *it != m.source) {
        throw ProtocolError("unexpected vector entries", s, m.source, -1);
      }
      const auto& ids = p.recv[it - p.recv_from.begin()];
      ByteReader in(m.payload);
      const std::vector<double> v = in.get_vector<double>();
      if (v.size() != ids.size()) {
        throw ProtocolError("vector entry count does not match the plan", s, m.source,
                            static_cast<std::int64_t>(v.size()));
      }
      for (std::size_t i = 0; i < ids.size(); ++i) ghost.emplace_back(ids[i], v[i]);
    }
    std::sort(ghost.begin(), ghost.end());
    auto value = [&](std::int64_t g) {
      if (g >= sys.owned_begin && g < sys.owned_end) return x[g];
      const auto it = std::lower_bound(ghost.begin(), ghost.end(),
                                       std::pair<std::int64_t, double>{g, -1e300});
      if (it == ghost.end() || it->first != g) {
        throw ProtocolError("missing off-owned vector entry", s, -1, g);
      }
      return it->second;
    };
    const auto& ptr = sys.matrix.row_ptr();
    const auto& col = sys.matrix.col_idx();
    const auto& val = sys.matrix.values();
    for (std::int64_t r = 0; r < sys.num_owned(); ++r) {
      double acc = 0.0;
      for (std::int64_t i = ptr[r]; i < ptr[r + 1]; ++i) acc += val[i] * value(col[i]);
      y[sys.owned_begin + r] = acc;
    }
  });
}

double distributed_dot(Runtime& rt, std::span<const DistributedSystem> systems,
                       std::span<const double> a, std::span<const double> b) {
  rt.superstep("reduce.dot", [&](ProcessContext& ctx) {
    const DistributedSystem& sys = systems[ctx.rank()];
    double acc = 0.0;
    for (std::int64_t g = sys.owned_begin; g < sys.owned_end; ++g) acc += a[g] * b[g];
    ctx.contribute_real(acc);
  });
  return rt.real_sum_result();
}

}  // namespace agfem
