#include <benchmark/benchmark.h>

#include "corrchan/channel.hpp"
#include "corrchan/fock.hpp"
#include "corrchan/lindblad.hpp"
#include "corrchan/observables.hpp"

using namespace corrchan;

namespace {

DensityOperator coherent_density(int d) {
  return superposition_to_density(coherent_state(0.8, cplx(0.0, 0.3)), ModeCutoff(d, d));
}

void BM_LiouvillianApply(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto kind = state.range(1) ? GeneratorKind::independent : GeneratorKind::correlated;
  const auto rho = coherent_density(d);
  const Liouvillian gen(kind, {1.0, 0.5}, rho.cutoff);
  Matrix out(rho.dim(), rho.dim());
  for (auto _ : state) {
    gen.apply(rho.matrix, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetLabel(kind == GeneratorKind::correlated ? "correlated" : "independent");
}
BENCHMARK(BM_LiouvillianApply)->Args({16, 0})->Args({18, 0})->Args({18, 1})->Args({24, 0})
    ->Unit(benchmark::kMicrosecond);

void BM_Evolve(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto rho = coherent_density(d);
  const std::vector<double> grid{0.1};
  SimConfig cfg;
  cfg.check_positivity = false;
  for (auto _ : state) {
    auto traj = evolve(rho, GeneratorKind::correlated, {1.0, 0.0}, cfg, grid);
    benchmark::DoNotOptimize(traj.states.back().matrix.data());
    state.counters["steps"] = static_cast<double>(traj.steps);
  }
}
BENCHMARK(BM_Evolve)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_ChiNumeric(benchmark::State& state) {
  const auto rho = coherent_density(static_cast<int>(state.range(0)));
  const PhasePoint pt{cplx(0.4, 0.3), cplx(-0.2, 0.5)};
  for (auto _ : state) benchmark::DoNotOptimize(chi_numeric(rho, pt));
}
BENCHMARK(BM_ChiNumeric)->Arg(18)->Arg(24)->Unit(benchmark::kMicrosecond);

void BM_ChiAnalytic(benchmark::State& state) {
  const auto dyads = dyad_expansion_of(entangled_coherent(0.8, 0.5, 1));
  const PhasePoint pt{cplx(0.4, 0.3), cplx(-0.2, 0.5)};
  const ChannelParams p(1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(chi_analytic(dyads, pt, p, 0.7));
}
BENCHMARK(BM_ChiAnalytic);

void BM_Displacement(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(displacement(cplx(0.5, -0.3), d).data());
}
BENCHMARK(BM_Displacement)->Arg(18)->Arg(28);

}  // namespace

BENCHMARK_MAIN();
