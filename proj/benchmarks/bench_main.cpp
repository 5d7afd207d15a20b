#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "spinsq/cavity.hpp"
#include "spinsq/closure.hpp"
#include "spinsq/twist.hpp"
#include "spinsq/wigner.hpp"

using namespace spinsq;

namespace {

std::vector<double> grid(double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = hi * i / (points - 1);
  return g;
}

void BM_MasterEquation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto times = grid(2.0 / n, 11);
  for (auto _ : state) {
    auto run = twist::evolve_master({n, 1.0, 0.1 * n, 0.1 * n}, times);
    benchmark::DoNotOptimize(run.diagnostics.max_trace_drift);
  }
}
BENCHMARK(BM_MasterEquation)->Arg(6)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Unitary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto times = grid(3.0 / n, 301);
  for (auto _ : state) benchmark::DoNotOptimize(twist::evolve_unitary(n, 1.0, times).rows.size());
}
BENCHMARK(BM_Unitary)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Closure(benchmark::State& state) {
  const auto taus = grid(4.0, 401);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        closure::integrate_closure({1.0 / 12, 0.1, closure::Representation::H}, taus).rows.size());
  }
}
BENCHMARK(BM_Closure)->Unit(benchmark::kMicrosecond);

void BM_ThreeJExact(benchmark::State& state) {
  const double j = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner::wigner3j(j, j, j, 1, -1, 0));
}
BENCHMARK(BM_ThreeJExact)->Arg(4)->Arg(20)->Arg(50);

void BM_ThreeJFloat(benchmark::State& state) {
  const double j = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner::wigner3j_float(j, j, j, 1, -1, 0));
}
BENCHMARK(BM_ThreeJFloat)->Arg(4)->Arg(20)->Arg(50);

void BM_WignerMap(benchmark::State& state) {
  const auto d = wigner::multipole_coeffs(dicke::psi_a_state(20, 1.0));
  const auto th = grid(std::numbers::pi, 64);
  const auto ph = grid(2 * std::numbers::pi, 128);
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner::wigner_map(d, th, ph, jobs).max_imaginary);
}
BENCHMARK(BM_WignerMap)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CovarianceMinimum(benchmark::State& state) {
  cavity::CavityParams p;
  p.g1 = p.g2 = 0.1;
  p.kappa_cav = 1.0;
  p.atoms = 1e6;
  p.omega1 = p.omega2 = 10.0;
  p.delta = cavity::optimal_detuning(p);
  for (auto _ : state) benchmark::DoNotOptimize(cavity::squeezing_minimum(p).var_yplus);
}
BENCHMARK(BM_CovarianceMinimum)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
