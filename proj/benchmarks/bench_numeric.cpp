#include <benchmark/benchmark.h>

#include "cwchaos/fourth_moment.hpp"
#include "cwchaos/stein.hpp"
#include "cwchaos/transport.hpp"

using namespace cwchaos;

static void BM_Sample(benchmark::State& state) {
  const GaussianSpec spec = GaussianSpec::standard(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample(spec, static_cast<std::size_t>(state.range(0)), 1, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1 << 16)->Arg(1 << 20);

static void BM_McMoments(benchmark::State& state) {
  const CWPoly z = CWPoly::z(1, 0);
  const ChaoticVector F{{Eigenfunction(z * z, 2)}, Rational(1)};
  for (auto _ : state) benchmark::DoNotOptimize(mc_moments(F, static_cast<std::size_t>(state.range(0)), 3, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McMoments)->Arg(1 << 16)->Arg(1 << 20);

static TransportProblem problem(std::size_t n) {
  return {sample(GaussianSpec::standard(1), n, 1, 1), sample(GaussianSpec::standard(1), n, 2, 1), 1};
}

static void BM_ExactAssignment(benchmark::State& state) {
  const TransportProblem p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(w1_exact(p));
}
BENCHMARK(BM_ExactAssignment)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_Sinkhorn(benchmark::State& state) {
  const TransportProblem p = problem(256);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(w1_sinkhorn(p, eps));
}
BENCHMARK(BM_Sinkhorn)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_SteinSolve(benchmark::State& state) {
  SteinSolverConfig cfg;
  cfg.mc_samples = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  const SteinSolver solver(make_gaussian_bump_field(1), GaussianSpec::standard(1), cfg);
  const std::vector<cplx> z{{0.3, -0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(z));
}
BENCHMARK(BM_SteinSolve)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
