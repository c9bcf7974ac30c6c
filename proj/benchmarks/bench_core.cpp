#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "chs/energy.hpp"
#include "chs/mountain_pass.hpp"
#include "chs/singular_quadrature.hpp"

namespace chs {
namespace {

ProblemParams case_one() {
  ProblemParams pr;
  pr.N = 3;
  pr.alpha = 1.0;
  pr.s = 0.0;
  pr.p = 2.0;
  pr.q = 4.0;
  return pr;
}

void BM_AngularKernel(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  double a = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(riesz_angular_kernel(a, 1.0, 1.5, N));
    a = a < 0.9 ? a + 1e-3 : 0.3;
  }
}
BENCHMARK(BM_AngularKernel)->Arg(3)->Arg(4)->Arg(5);

void BM_AssembleRiesz(benchmark::State& state) {
  const auto g = RadialGrid::make(1.0, static_cast<int>(state.range(0)), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_riesz_matrix(g, 1.0, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleRiesz)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EnergyAndGradient(benchmark::State& state) {
  const auto g = RadialGrid::make(1.0, static_cast<int>(state.range(0)), 2.0);
  const EnergyFunctional F(case_one(), assemble_riesz_matrix(g, 1.0));
  const auto u = default_probe(g).values();
  std::vector<double> grad(u.size());
  for (auto _ : state) benchmark::DoNotOptimize(F.energy_and_gradient(u, grad));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnergyAndGradient)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_ProfileDoubleIntegral(benchmark::State& state) {
  const double alpha = state.range(0) / 2.0;
  const double scale[] = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        riesz_double_integral_profile([](double r) { return std::exp(-r * r); }, 3, alpha, scale, INFINITY));
  }
}
// α = 1 and the singular diagonal α = 2.
BENCHMARK(BM_ProfileDoubleIntegral)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MountainPassSolve(benchmark::State& state) {
  const auto g = RadialGrid::make(1.0, static_cast<int>(state.range(0)), 2.0);
  const auto k = assemble_riesz_matrix(g, 1.0);
  SolverConfig cfg;
  cfg.record_iterates = false;
  for (auto _ : state) benchmark::DoNotOptimize(mountain_pass_solve(case_one(), cfg, k));
}
BENCHMARK(BM_MountainPassSolve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace chs

BENCHMARK_MAIN();
