#include "coalforge/crtsim.hpp"
#include "coalforge/lambdasim.hpp"
#include "coalforge/prunesim.hpp"
#include "coalforge/specfun.hpp"

#include <benchmark/benchmark.h>

using namespace coalforge;

static void BM_SampleUniform(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(tree::sample_uniform(static_cast<int>(state.range(0)), rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SampleUniform)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_PruneChain(benchmark::State& state) {
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(prune::run_chain(static_cast<int>(state.range(0)), rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PruneChain)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_LambdaChain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto table = lambda::build_table(specfun::LambdaMeasure::pruning(), n);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(lambda::run_lambda_chain(n, table, rng));
}
BENCHMARK(BM_LambdaChain)->Arg(10)->Arg(100)->Arg(1000);

static void BM_BuildTableQuadrature(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(lambda::build_table(specfun::LambdaMeasure::beta(0.7, 1.3), static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BuildTableQuadrature)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_CrtPruning(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) {
    const auto t = crt::sample_reduced_tree(static_cast<int>(state.range(0)), rng);
    benchmark::DoNotOptimize(crt::run_crt_pruning(t, {}, rng));
  }
}
BENCHMARK(BM_CrtPruning)->RangeMultiplier(4)->Range(8, 2048);

static void BM_ThetaPath(benchmark::State& state) {
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(crt::estimate_theta_integral(rng));
}
BENCHMARK(BM_ThetaPath);

static void BM_PgfExtract(benchmark::State& state) {
  const int kmax = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::pgf_extract(
        [](specfun::Complex z) { return specfun::gf_phi(z, z); }, kmax, 0.9));
  }
}
BENCHMARK(BM_PgfExtract)->Arg(16)->Arg(64);
BENCHMARK_MAIN();
