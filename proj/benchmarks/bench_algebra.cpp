#include <benchmark/benchmark.h>

#include "cwchaos/experiment.hpp"
#include "cwchaos/hermite.hpp"
#include "cwchaos/ou.hpp"
#include "cwchaos/verify.hpp"

using namespace cwchaos;

static void BM_HermitePoly(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hermite::hermite_poly(p, p));
}
BENCHMARK(BM_HermitePoly)->Arg(4)->Arg(8)->Arg(16);

static void BM_GaussianExpectation(benchmark::State& state) {
  Engine e = make_engine(1, 0);
  const CWPoly f = random_poly(e, {3, static_cast<unsigned>(state.range(0)), 8, 3});
  const CWPoly g = f * f.conj();
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_expectation(g));
}
BENCHMARK(BM_GaussianExpectation)->Arg(2)->Arg(4)->Arg(6);

static void BM_Gamma(benchmark::State& state) {
  Engine e = make_engine(2, 0);
  const CWPoly f = random_chaos_poly(e, 2, static_cast<unsigned>(state.range(0)));
  const CWPoly g = random_chaos_poly(e, 2, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ou::gamma(f, g));
}
BENCHMARK(BM_Gamma)->Arg(2)->Arg(4);

static void BM_ExactMomentsSumOfSquares(benchmark::State& state) {
  const ChaoticVector F = sum_of_squares(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_moments(F));
}
BENCHMARK(BM_ExactMomentsSumOfSquares)->Arg(4)->Arg(16)->Arg(64);

static void BM_Thm1Integrals(benchmark::State& state) {
  const ChaoticVector F = sum_of_squares(static_cast<std::size_t>(state.range(0)));
  const RationalMatrix sigma = RationalMatrix::scalar(1, Rational(2));
  for (auto _ : state) benchmark::DoNotOptimize(thm1_integrals(F, sigma));
}
BENCHMARK(BM_Thm1Integrals)->Arg(4)->Arg(16);
