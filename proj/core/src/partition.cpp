// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/partition.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "agfem/errors.hpp"

namespace agfem {
namespace {

using Interval = std::pair<std::int64_t, std::int64_t>;

// Boundary indices reachable after each part when every part weight lies in
// [lo, hi]. Each set is an interval of prefix indices.
std::optional<std::vector<Interval>> reachable(const std::vector<double>& prefix,
                                               int parts, double lo, double hi) {
  const auto n = static_cast<std::int64_t>(prefix.size()) - 1;
  std::vector<Interval> iv{{0, 0}};
  std::int64_t a = 0;
  std::int64_t b = 0;
  for (int p = 0; p < parts; ++p) {
    const double from = prefix[a] + lo;
    const double to = prefix[b] + hi;
    const std::int64_t na =
        std::lower_bound(prefix.begin(), prefix.end(), from) - prefix.begin();
    const std::int64_t nb =
        (std::upper_bound(prefix.begin(), prefix.end(), to) - prefix.begin()) - 1;
    if (na > nb || na > n) return std::nullopt;
    a = na;
    b = std::min(nb, n);
    iv.emplace_back(a, b);
  }
  return iv;
}

std::vector<std::int64_t> nearest_prefix_split(const std::vector<double>& prefix,
                                               int parts) {
  const auto n = static_cast<std::int64_t>(prefix.size()) - 1;
  const double total = prefix.back();
  std::vector<std::int64_t> cuts{0};
  for (int p = 1; p < parts; ++p) {
    const double target = total * p / parts;
    auto i = std::lower_bound(prefix.begin(), prefix.end(), target) - prefix.begin();
    if (i > 0 && target - prefix[i - 1] <= prefix[i] - target) --i;
    i = std::clamp<std::int64_t>(i, cuts.back() + 1, n - (parts - p));
    cuts.push_back(i);
  }
  cuts.push_back(n);
  return cuts;
}

}  // namespace

std::vector<std::int64_t> split_weighted(std::span<const double> weights,
                                         int parts) {
  const auto n = static_cast<std::int64_t>(weights.size());
  if (parts < 1) throw ContractViolation("partition needs at least one part");
  if (parts > n) {
    throw ContractViolation("cannot split " + std::to_string(n) + " cells into " +
                            std::to_string(parts) + " parts");
  }
  std::vector<double> prefix(n + 1, 0.0);
  double wmax = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) throw ContractViolation("weights must be positive");
    prefix[i + 1] = prefix[i] + weights[i];
    wmax = std::max(wmax, weights[i]);
  }
  if (parts == 1) return {0, n};

  // Largest lower bound L such that parts with weights in [L, L + wmax] can
  // still cover the whole sequence.
  auto feasible = [&](double lo) {
    const auto iv = reachable(prefix, parts, lo, lo + wmax);
    return iv && iv->back().first <= n;
  };
  double lo = 0.0;
  double hi = prefix.back() / parts;
  if (feasible(lo)) {
    for (int it = 0; it < 200 && lo < hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (feasible(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const auto iv = reachable(prefix, parts, lo, lo + wmax);
    if (iv && iv->back().second >= n && lo > 0.0) {
      const double slack = 1e-12 * prefix.back();
      std::vector<std::int64_t> cuts(parts + 1);
      cuts[parts] = n;
      bool ok = true;
      for (int p = parts; p > 0 && ok; --p) {
        const std::int64_t j = cuts[p];
        const auto [a, b] = (*iv)[p - 1];
        std::int64_t pick = -1;
        for (std::int64_t i = std::min(b, j - 1); i >= a; --i) {
          const double w = prefix[j] - prefix[i];
          if (w > lo + wmax + slack) break;
          if (w >= lo - slack) {
            pick = i;
            break;
          }
        }
        ok = pick >= 0;
        cuts[p - 1] = pick;
      }
      if (ok && cuts[0] == 0) return cuts;
    }
  }
  return nearest_prefix_split(prefix, parts);
}

std::vector<double> Partition::part_weights() const {
  std::vector<double> w(num_parts, 0.0);
  for (std::size_t i = 0; i < owner.size(); ++i) w[owner[i]] += weight[i];
  return w;
}

Partition partition_weighted_sfc(const CellClassification& cls,
                                 std::span<const double> weights, int parts) {
  if (parts > cls.num_active()) {
    throw ContractViolation("partition count " + std::to_string(parts) +
                            " exceeds the number of active cells " +
                            std::to_string(cls.num_active()));
  }
  if (weights.size() != cls.kind.size()) {
    throw ContractViolation("one weight per background cell expected");
  }
  const auto cuts = split_weighted(weights, parts);
  std::vector<int> owner(cls.kind.size());
  for (int p = 0; p < parts; ++p) {
    for (std::int64_t i = cuts[p]; i < cuts[p + 1]; ++i) owner[i] = p;
  }
  Partition out = partition_from_owners(cls, std::move(owner), parts);
  out.weight.assign(weights.begin(), weights.end());
  return out;
}

Partition partition_weighted_sfc(const CellClassification& cls,
                                 double active_weight, int parts,
                                 double exterior_weight) {
  std::vector<double> w(cls.kind.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = cls.kind[i] == CellKind::exterior ? exterior_weight : active_weight;
  }
  return partition_weighted_sfc(cls, w, parts);
}

Partition partition_from_owners(const CellClassification& cls,
                                std::vector<int> owner, int parts) {
  if (owner.size() != cls.kind.size()) {
    throw ContractViolation("one owner per background cell expected");
  }
  Partition out;
  out.num_parts = parts;
  for (int o : owner) {
    if (o < 0 || o >= parts) throw ContractViolation("owner id out of range");
  }
  out.owner = std::move(owner);
  out.weight.assign(out.owner.size(), 1.0);
  out.active_owner.resize(cls.num_active());
  for (std::int64_t k = 0; k < cls.num_active(); ++k) {
    out.active_owner[k] = out.owner[cls.active_cells[k]];
  }
  return out;
}

std::int64_t SubdomainMesh::local_of(std::int64_t global_id) const {
  const auto begin = global.begin();
  const auto mid = begin + num_local;
  auto it = std::lower_bound(begin, mid, global_id);
  if (it != mid && *it == global_id) return it - begin;
  it = std::lower_bound(mid, global.end(), global_id);
  if (it != global.end() && *it == global_id) return it - begin;
  return -1;
}

int SubdomainMesh::neighbor_index(int s) const {
  const auto it = std::lower_bound(neighbors.begin(), neighbors.end(), s);
  if (it == neighbors.end() || *it != s) return -1;
  return static_cast<int>(it - neighbors.begin());
}

std::vector<SubdomainMesh> build_subdomain_meshes(const BackgroundGrid& grid,
                                                  const CellClassification& cls,
                                                  const ActiveMesh& mesh,
                                                  const Partition& partition) {
  const int parts = partition.num_parts;
  const std::int64_t n = cls.num_active();
  std::vector<std::vector<std::int64_t>> locals(parts);
  std::vector<std::set<std::int64_t>> ghosts(parts);
  std::vector<std::map<int, std::set<std::int64_t>>> shared(parts);
  for (std::int64_t k = 0; k < n; ++k) {
    const int s = partition.active_owner[k];
    locals[s].push_back(k);
    for (const Lattice& c : grid.vertex_neighbors(mesh.lattice[k])) {
      const std::int64_t other = cls.active_id[grid.morton(c)];
      if (other < 0) continue;
      const int t = partition.active_owner[other];
      if (t == s) continue;
      ghosts[s].insert(other);
      shared[s][t].insert(k);
    }
  }

  std::vector<SubdomainMesh> out(parts);
  for (int s = 0; s < parts; ++s) {
    SubdomainMesh& m = out[s];
    m.id = s;
    m.num_local = static_cast<std::int64_t>(locals[s].size());
    m.global = locals[s];
    m.global.insert(m.global.end(), ghosts[s].begin(), ghosts[s].end());
    const std::int64_t size = m.size();
    m.owner.resize(size);
    m.interior.resize(size);
    m.barycenter.resize(size);
    m.lattice.resize(size);
    m.faces.resize(size);
    std::set<int> nbrs;
    for (std::int64_t l = 0; l < size; ++l) {
      const std::int64_t k = m.global[l];
      m.owner[l] = partition.active_owner[k];
      if (l >= m.num_local) nbrs.insert(m.owner[l]);
      m.interior[l] = mesh.interior[k];
      m.barycenter[l] = mesh.barycenter[k];
      m.lattice[l] = mesh.lattice[k];
    }
    for (std::int64_t l = 0; l < size; ++l) {
      for (const FaceLink& f : mesh.neighbors[m.global[l]]) {
        const std::int64_t lf = m.local_of(f.cell);
        if (lf >= 0) m.faces[l].push_back({lf, f.active});
      }
    }
    m.neighbors.assign(nbrs.begin(), nbrs.end());
    for (int t : m.neighbors) {
      std::vector<std::int64_t> list;
      for (std::int64_t k : shared[s][t]) list.push_back(m.local_of(k));
      m.shared.push_back(std::move(list));
    }
  }
  return out;
}

}  // namespace agfem
