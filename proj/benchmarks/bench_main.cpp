#include <benchmark/benchmark.h>

#include <memory>

#include "saddle/profile1d.hpp"
#include "saddle/solver.hpp"
#include "saddle/stability.hpp"

namespace {

using namespace saddle;

void BM_BuildProfile(benchmark::State& state) {
  const Nonlinearity nl = make_builtin("allen_cahn");
  for (auto _ : state) {
    const Profile1D p = build_profile(nl, 20.0, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(p.u0().data());
  }
}
BENCHMARK(BM_BuildProfile)->Arg(1001)->Arg(4001);

void BM_GaussSeidelSweeps(benchmark::State& state) {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = std::make_shared<const TriangleGrid>(
      build_grid(2, 16.0, 16.0 / static_cast<double>(state.range(0))));
  const Field guess = initial_guess(grid, nl);
  SolveOptions opts;
  opts.max_iter = 50;
  opts.tol = 0.0;  // run exactly max_iter sweeps
  for (auto _ : state) {
    auto [fld, rep] = minimize(guess, nl, opts);
    benchmark::DoNotOptimize(rep.energy);
  }
  state.SetItemsProcessed(state.iterations() * 50 * grid->nodes.size());
}
BENCHMARK(BM_GaussSeidelSweeps)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DiscreteEnergy(benchmark::State& state) {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = std::make_shared<const TriangleGrid>(build_grid(2, 16.0, 0.125));
  const Field f = initial_guess(grid, nl);
  for (auto _ : state) benchmark::DoNotOptimize(discrete_energy(f, nl));
}
BENCHMARK(BM_DiscreteEnergy);

void BM_WedgeForm(benchmark::State& state) {
  const Nonlinearity nl = make_builtin("allen_cahn");
  const Profile1D p = build_profile(nl, 20.0, 4001);
  const EtaFamily fam(0.05, 100.0, 0.75);
  const XiYZ xi = separable_xi(fam, p, static_cast<double>(state.range(0)));
  const VSource v = VSource::from_profile(p);
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_form_yz(v, xi, nl, 2).value);
}
BENCHMARK(BM_WedgeForm)->Arg(5)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SpectrumSmallest(benchmark::State& state) {
  const Nonlinearity nl = make_builtin("allen_cahn");
  auto grid = std::make_shared<const TriangleGrid>(build_grid(2, 12.0, 0.25));
  auto [fld, rep] = minimize(initial_guess(grid, nl), nl, {});
  const SaddleField refl = reflect_odd(fld);
  for (auto _ : state)
    benchmark::DoNotOptimize(linearized_spectrum(refl, nl, 2).eigenvalues[0]);
}
BENCHMARK(BM_SpectrumSmallest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
