// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

// Timings of the pipeline stages on the circle domain; the argument is the
// refinement level (and the process count for the distributed stages).

#include <benchmark/benchmark.h>

#include "agfem/aggregation.hpp"
#include "agfem/classification.hpp"
#include "agfem/parallel_aggregation.hpp"
#include "agfem/partition.hpp"
#include "agfem/problem.hpp"
#include "agfem/solver.hpp"

namespace agfem {
namespace {

ProblemConfig circle(int level) {
  ProblemConfig c;
  c.geometry = "circle";
  c.level = level;
  c.solution = "sine";
  return c;
}

void BM_Classify(benchmark::State& state) {
  const BackgroundGrid grid(BoundingBox::unit(), static_cast<int>(state.range(0)), 2);
  const LevelSetPtr ls = make_geometry("circle", 2);
  for (auto _ : state) benchmark::DoNotOptimize(classify_cells(grid, *ls));
  state.SetItemsProcessed(state.iterations() * grid.num_cells());
}
BENCHMARK(BM_Classify)->DenseRange(6, 9);

void BM_AggregateSerial(benchmark::State& state) {
  const BackgroundGrid grid(BoundingBox::unit(), static_cast<int>(state.range(0)), 2);
  const LevelSetPtr ls = make_geometry("circle", 2);
  const CellClassification cls = classify_cells(grid, *ls);
  const ActiveMesh mesh = build_active_mesh(grid, *ls, cls);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_serial(mesh));
  state.SetItemsProcessed(state.iterations() * mesh.size());
}
BENCHMARK(BM_AggregateSerial)->DenseRange(6, 9);

void BM_AggregateParallel(benchmark::State& state) {
  const BackgroundGrid grid(BoundingBox::unit(), static_cast<int>(state.range(0)), 2);
  const LevelSetPtr ls = make_geometry("circle", 2);
  const CellClassification cls = classify_cells(grid, *ls);
  const ActiveMesh mesh = build_active_mesh(grid, *ls, cls);
  const int parts = static_cast<int>(state.range(1));
  const Partition p = partition_weighted_sfc(cls, 10.0, parts);
  const std::vector<SubdomainMesh> meshes = build_subdomain_meshes(grid, cls, mesh, p);
  std::vector<std::vector<int>> graph;
  for (const SubdomainMesh& m : meshes) graph.push_back(m.neighbors);
  for (auto _ : state) {
    Runtime rt(parts);
    rt.set_neighbors(graph);
    benchmark::DoNotOptimize(aggregate_parallel(rt, meshes));
  }
}
BENCHMARK(BM_AggregateParallel)->ArgsProduct({{6, 8}, {4, 16}});

void BM_AssembleSerial(benchmark::State& state) {
  const Discretization d = discretize(circle(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(d));
}
BENCHMARK(BM_AssembleSerial)->DenseRange(5, 8);

void BM_DistributedPipeline(benchmark::State& state) {
  const Discretization d = discretize(circle(static_cast<int>(state.range(0))));
  const int parts = static_cast<int>(state.range(1));
  const Partition p = partition_weighted_sfc(d.cls, 10.0, parts);
  for (auto _ : state) {
    Runtime rt(parts);
    benchmark::DoNotOptimize(run_distributed(d, rt, p));
  }
}
BENCHMARK(BM_DistributedPipeline)->ArgsProduct({{6, 7}, {4, 16}});

void BM_PcgJacobi(benchmark::State& state) {
  const Discretization d = discretize(circle(static_cast<int>(state.range(0))));
  const SerialSystem s = assemble(d);
  SolverOptions o;
  o.rtol = 1e-8;
  o.maxit = 5000;
  o.lanczos_steps = 0;
  for (auto _ : state) {
    SolveReport r;
    benchmark::DoNotOptimize(pcg_jacobi(s.matrix, s.rhs, o, r));
    state.counters["iterations"] = r.iterations;
  }
}
BENCHMARK(BM_PcgJacobi)->DenseRange(5, 8);

}  // namespace
}  // namespace agfem

BENCHMARK_MAIN();
