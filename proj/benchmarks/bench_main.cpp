#include <benchmark/benchmark.h>

#include <reslab/reslab.hpp>

using namespace reslab;

namespace {

const double kAlpha3 = -1.0 / (8.0 * pi);

ModelParams coupled() { return ModelParams::make(3, kAlpha3, 1.0, 0.1 * -kAlpha3); }

void BM_Hankel(benchmark::State& state) {
  const cplx eta(static_cast<double>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(hankel0_first_kind(eta));
}
BENCHMARK(BM_Hankel)->Arg(1)->Arg(10)->Arg(40);

void BM_GammaDet(benchmark::State& state) {
  const ModelParams p = coupled();
  for (auto _ : state) benchmark::DoNotOptimize(gamma_eps(p, cplx(0.75, -0.001), SheetPair::resonance()).det());
}
BENCHMARK(BM_GammaDet);

void BM_BoundStates(benchmark::State& state) {
  const ModelParams p = coupled();
  for (auto _ : state) benchmark::DoNotOptimize(bound_states(p));
}
BENCHMARK(BM_BoundStates)->Unit(benchmark::kMillisecond);

void BM_ResonanceNewton(benchmark::State& state) {
  const ModelParams p = coupled();
  for (auto _ : state) benchmark::DoNotOptimize(resonance_newton(p));
}
BENCHMARK(BM_ResonanceNewton);

void BM_FixedPoint(benchmark::State& state) {
  const ModelParams p = coupled();
  for (auto _ : state) benchmark::DoNotOptimize(resonance_fixed_point(p));
}
BENCHMARK(BM_FixedPoint);

void BM_QuarticRoots(benchmark::State& state) {
  const ModelParams p = coupled();
  for (auto _ : state) benchmark::DoNotOptimize(quartic_roots(p));
}
BENCHMARK(BM_QuarticRoots);

void BM_DirectQuadrature(benchmark::State& state) {
  const ModelParams p = coupled();
  const ProjectorModel m(p, EnergyWindow::make(p));
  const double t = static_cast<double>(state.range(0)) / -m.resonance().imag();
  for (auto _ : state) benchmark::DoNotOptimize(m.direct(t, 0.3, 0.5));
}
BENCHMARK(BM_DirectQuadrature)->Arg(0)->Arg(1)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_ArcQuadrature(benchmark::State& state) {
  const ModelParams p = coupled();
  const ProjectorModel m(p, EnergyWindow::make(p));
  const double t = static_cast<double>(state.range(0)) / -m.resonance().imag();
  for (auto _ : state) benchmark::DoNotOptimize(m.arc_term(t, 0.3, 0.5));
}
BENCHMARK(BM_ArcQuadrature)->Arg(0)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_RemainderHs(benchmark::State& state) {
  const ModelParams p = coupled();
  const ProjectorModel m(p, EnergyWindow::make(p, 0.01));
  const double t = static_cast<double>(state.range(0)) / -m.resonance().imag();
  for (auto _ : state) benchmark::DoNotOptimize(remainder_hs_norm(m, t));
}
BENCHMARK(BM_RemainderHs)->Arg(0)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
