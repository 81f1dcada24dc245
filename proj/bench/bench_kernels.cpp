// Serial reference vs OpenMP path for each parallel kernel. Arg 0 = serial,
// 1 = parallel.

#include <benchmark/benchmark.h>

#include <vector>

#include "fmb/bath.hpp"
#include "fmb/dispersion.hpp"
#include "fmb/emission.hpp"
#include "fmb/langevin.hpp"
#include "fmb/maxwell_lorentz.hpp"

using namespace fmb;

namespace {

Execution policy(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_FdtIdentity(benchmark::State& state) {
  const DispersionParams m{1.2, 0.9, 0.3};
  const auto grid = linspace(0.01, 9.0, 100000);
  for (auto _ : state)
    benchmark::DoNotOptimize(fdt_identity_error(m, grid, 1.0, LossRegime::HighLoss, policy(state)));
}
BENCHMARK(BM_FdtIdentity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KramersKronig(benchmark::State& state) {
  const DispersionParams m{1.0, 1.0, 0.2};
  const auto grid = linspace(-20.0, 20.0, 100001);
  KramersKronigOptions o;
  o.eval_stride = 200;
  for (auto _ : state)
    benchmark::DoNotOptimize(kramers_kronig_check(m, grid, LossRegime::LowLoss, o, policy(state)));
}
BENCHMARK(BM_KramersKronig)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MemoryKernel(benchmark::State& state) {
  const auto sys = make_flat_bath(1.0, 0.05, 0.2, 1.8, 2000);
  std::vector<double> tau(4001);
  for (std::size_t k = 0; k < tau.size(); ++k)
    tau[k] = 0.05 * static_cast<double>(k);
  for (auto _ : state)
    benchmark::DoNotOptimize(memory_kernel(sys, tau, policy(state)));
}
BENCHMARK(BM_MemoryKernel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LangevinEnsemble(benchmark::State& state) {
  LangevinParams p;
  p.eta = 0.05;
  p.noise_power = 0.05;
  LangevinOptions o;
  o.sample_every = 20;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_ensemble(p, {1.0, 0.0}, 40.0, 0.05, 1024, 3, o, policy(state)));
}
BENCHMARK(BM_LangevinEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Susceptibility(benchmark::State& state) {
  LangevinParams p;
  p.eta = 0.1;
  p.omega_p = 0.7;
  const auto w = linspace(0.5, 1.5, 16);
  for (auto _ : state)
    benchmark::DoNotOptimize(measure_susceptibility(p, w, {}, policy(state)));
}
BENCHMARK(BM_Susceptibility)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GreenFunction(benchmark::State& state) {
  const Grid1D g(400, 0.1, 0.09, Boundary::Mur1);
  const std::vector<DispersionParams> vac(400);
  const auto probes = linspace(0.5, 2.0, 64);
  GreenOptions o;
  o.t_end = 300.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(green_function_1d(g, vac, 20.0, probes, o, policy(state)));
}
BENCHMARK(BM_GreenFunction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
