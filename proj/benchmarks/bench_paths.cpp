#include <benchmark/benchmark.h>

#include "gsc/examples.hpp"
#include "gsc/noise.hpp"
#include "gsc/simulate.hpp"

using namespace gsc;

namespace {

void BM_NoiseStream(benchmark::State& state) {
  const NoiseStream noise(42, 0);
  std::uint64_t step = 0;
  double acc = 0.0;
  for (auto _ : state) acc += noise.gaussian(step++, 1e-3);
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NoiseStream);

void BM_SimulatePaths(benchmark::State& state) {
  const auto n_paths = static_cast<int>(state.range(0));
  const auto ex = example2(0.5);
  auto feedback = [fb = ex.oracle.feedback](double s, double x) { return fb(s, x); };
  SimulateOptions opt;
  opt.n_threads = static_cast<int>(state.range(1));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto bundle = simulate_forward(ex.problem, feedback, ScenarioMeasure::constant(1.0), 0.0,
                                   1.0, 256, n_paths, seed++, opt);
    benchmark::DoNotOptimize(bundle.X.a.data());
  }
  state.SetItemsProcessed(state.iterations() * n_paths * 256);
}
BENCHMARK(BM_SimulatePaths)->Args({256, 1})->Args({1024, 1})->Args({1024, 4});

void BM_KtildeAccumulate(benchmark::State& state) {
  const auto ex = example2(0.5);
  const auto view = view_of(ex.oracle);
  auto feedback = [fb = ex.oracle.feedback](double s, double x) { return fb(s, x); };
  auto bundle = simulate_forward(ex.problem, feedback, ScenarioMeasure::constant(1.0), 0.0, 1.0,
                                 512, 64, 9);
  for (auto _ : state) {
    ktilde_accumulate(bundle, view, ex.problem);
    benchmark::DoNotOptimize(bundle.Ktilde.a.data());
  }
}
BENCHMARK(BM_KtildeAccumulate);

}  // namespace

BENCHMARK_MAIN();
