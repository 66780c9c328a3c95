#include <benchmark/benchmark.h>

#include "gsc/examples.hpp"
#include "gsc/hjb.hpp"

using namespace gsc;

namespace {

void BM_GHeatStep(benchmark::State& state) {
  const auto nx = static_cast<int>(state.range(0));
  const VolBounds bounds{0.2, 1.0};
  for (auto _ : state) {
    auto result = gheat_solve([](double x) { return x * x; }, 0.01, bounds, -4.0, 4.0, nx, 0.9, 1);
    benchmark::DoNotOptimize(result.u.data());
  }
  state.SetComplexityN(nx);
}
BENCHMARK(BM_GHeatStep)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_Example1Solve(benchmark::State& state) {
  const auto nx = static_cast<int>(state.range(0));
  const auto ex = example1(1.0);
  Grid grid = make_grid(ex.problem, -2.0, 2.0, nx, 0.0, 0.9, BoundaryMode::OracleDirichlet, 1);
  HjbOptions opt;
  opt.boundary = ex.oracle.value;
  opt.n_threads = 1;
  for (auto _ : state) {
    auto surface = hjb_solve(ex.problem, grid, opt);
    benchmark::DoNotOptimize(surface.at(0, nx / 2));
  }
  state.SetComplexityN(nx);
}
BENCHMARK(BM_Example1Solve)->RangeMultiplier(2)->Range(101, 1601)->Complexity();

void BM_Example3ControlMesh(benchmark::State& state) {
  const auto umesh = static_cast<int>(state.range(0));
  const auto ex = example3(2.0, 1.25);
  Grid grid = make_grid(ex.problem, -3.0, 3.0, 201, 0.0, 0.9, BoundaryMode::OracleDirichlet, umesh);
  HjbOptions opt;
  opt.boundary = ex.oracle.value;
  opt.u_mesh_n = umesh;
  opt.n_threads = 1;
  for (auto _ : state) {
    auto surface = hjb_solve(ex.problem, grid, opt);
    benchmark::DoNotOptimize(surface.at(0, 100));
  }
}
BENCHMARK(BM_Example3ControlMesh)->Arg(5)->Arg(17)->Arg(65);

}  // namespace

BENCHMARK_MAIN();
