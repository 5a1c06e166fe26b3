#include <benchmark/benchmark.h>

#include "springfem/analysis.hpp"
#include "springfem/experiments.hpp"
#include "springfem/spring_system.hpp"

using namespace springfem;

static void BM_AssembleSprings(benchmark::State& state) {
  const Mesh m = equilateral(static_cast<int>(state.range(0)));
  const auto pairs = spring_adjacency(m);
  const auto c = isotropic_tensor(material_from_poisson(0.2, 1.0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_springs(m, c, pairs));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * pairs.size()));
}
BENCHMARK(BM_AssembleSprings)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_AssembleSprings3D(benchmark::State& state) {
  const Mesh m = cube_kuhn(static_cast<int>(state.range(0)));
  const auto pairs = spring_adjacency(m);
  const auto c = random_full_symmetric_tensor(1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_springs(m, c, pairs));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * pairs.size()));
}
BENCHMARK(BM_AssembleSprings3D)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Sweep(benchmark::State& state) {
  const std::vector<NamedMesh> meshes{{"equilateral", equilateral(static_cast<int>(state.range(0)))}};
  const auto grid = default_poisson_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sweep(meshes, grid));
}
BENCHMARK(BM_Sweep)->Arg(32)->Arg(99)->Unit(benchmark::kMillisecond);

static void BM_Solve(benchmark::State& state) {
  const Mesh m = square_right(static_cast<int>(state.range(0)));
  const auto c = isotropic_tensor(material_from_poisson(0.3, 1.0), 2);
  const auto sys = build_system(m, c, constant_field(Vec(Eigen::Vector2d(0.0, -1.0))), constant_field(zero_vec(2)));
  SolverOptions opt;
  if (state.range(1)) opt.direct_max_unknowns = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve(sys, opt));
}
BENCHMARK(BM_Solve)->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
