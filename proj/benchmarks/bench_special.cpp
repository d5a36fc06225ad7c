#include <benchmark/benchmark.h>

#include "popval/discrete.hpp"
#include "popval/special.hpp"

namespace {

void BM_LogGamma(benchmark::State& state) {
  double z = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(popval::log_gamma(z));
    z = z < 1e6 ? z * 1.1 : 0.3;
  }
}
BENCHMARK(BM_LogGamma);

void BM_RegIncBeta_Small(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(popval::reg_inc_beta(0.3, 2.5, 4.2));
}
BENCHMARK(BM_RegIncBeta_Small);

void BM_RegIncBeta_SurveyScale(benchmark::State& state) {
  // the newborn-proportion posterior tail: a+b ~ 5.6e4, x at the mean
  for (auto _ : state)
    benchmark::DoNotOptimize(popval::reg_inc_beta(0.5, 28299.0, 27802.0));
}
BENCHMARK(BM_RegIncBeta_SurveyScale);

void BM_RegIncBeta_CentralMillion(benchmark::State& state) {
  // worst convergence region of the continued fraction
  for (auto _ : state)
    benchmark::DoNotOptimize(popval::reg_inc_beta(0.4999, 1e6, 1e6));
}
BENCHMARK(BM_RegIncBeta_CentralMillion);

void BM_NormalCdf(benchmark::State& state) {
  double z = -8.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(popval::normal_cdf(z));
    z = z < 8.0 ? z + 1e-3 : -8.0;
  }
}
BENCHMARK(BM_NormalCdf);

void BM_ExactBinomTail(benchmark::State& state) {
  popval::BinomialSample data(28298, 56099);
  popval::NullPoint null(0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        popval::binom_exact_pvalue(data, null, popval::Tail::upper));
}
BENCHMARK(BM_ExactBinomTail);

}  // namespace
