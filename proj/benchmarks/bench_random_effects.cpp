#include <benchmark/benchmark.h>

#include "popval/random_effects.hpp"

namespace {

popval::LmmConfig config(std::int64_t n, std::int64_t J) {
  return popval::LmmConfig(n, J, 0.2, 1.0, 0.5, 0.5, 42);
}

void BM_GenerateLmm(benchmark::State& state) {
  auto cfg = config(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(popval::generate_lmm(cfg));
}
BENCHMARK(BM_GenerateLmm)->Args({100, 2})->Args({500, 5});

void BM_FitLmmMl(benchmark::State& state) {
  popval::LmmData data = popval::generate_lmm(config(state.range(0), state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(popval::fit_lmm_ml(data));
}
BENCHMARK(BM_FitLmmMl)->Args({100, 2})->Args({500, 5});

void BM_GibbsChain1k(benchmark::State& state) {
  popval::LmmData data = popval::generate_lmm(config(state.range(0), state.range(1)));
  popval::GibbsOptions opts;
  opts.iters = 1000;
  opts.burnin = 0;
  for (auto _ : state) benchmark::DoNotOptimize(popval::gibbs_chain(data, opts));
}
BENCHMARK(BM_GibbsChain1k)->Args({100, 2})->Args({500, 5});

}  // namespace
