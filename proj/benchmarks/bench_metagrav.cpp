// Microbenchmarks for the hot paths: split-step propagation, partial trace,
// the Numerov radial solve, and the Monte Carlo potential oracle.

#include <benchmark/benchmark.h>

#include <cmath>

#include "metagrav/grid_dynamics.hpp"
#include "metagrav/radial_solver.hpp"
#include "metagrav/reduced_state.hpp"
#include "metagrav/sphere_potential.hpp"

using namespace metagrav;

namespace {

MetaHamiltonian harmonic_pair(int dims) {
  return MetaHamiltonian::cross_pairs(
      dims, std::vector<double>(dims, 1.0),
      [](double d) { return 0.5 * 0.05 * d * d; });
}

MetaWavefunction two_coord_state(int points) {
  Grid g(2, points, 32.0);
  auto a = gaussian_packet(points, g.extent, -1.5, 1.0, 0.3);
  auto b = gaussian_packet(points, g.extent, 1.5, 1.0, -0.3);
  return product_state(g, {a, b});
}

void BM_SplitStep2D(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  MetaWavefunction s = two_coord_state(points);
  MetaHamiltonian ham = harmonic_pair(2);
  Propagator prop(s.grid, ham, 1e-3, EvolutionMode::RealTime);
  for (auto _ : state) {
    prop.advance(s, 1);
    benchmark::DoNotOptimize(s.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations() * s.grid.total());
}
BENCHMARK(BM_SplitStep2D)->Arg(128)->Arg(256)->Arg(512);

void BM_SplitStep4D(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  Grid g(4, points, 13.44);
  auto a = gaussian_packet(points, g.extent, -3.0, 0.85, 0.0);
  auto b = gaussian_packet(points, g.extent, 3.0, 0.85, 0.0);
  MetaWavefunction s = product_state(g, {a, b, a, b});
  MetaHamiltonian ham = harmonic_pair(4);
  Propagator prop(g, ham, 1e-3, EvolutionMode::RealTime);
  for (auto _ : state) {
    prop.advance(s, 1);
    benchmark::DoNotOptimize(s.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations() * g.total());
}
BENCHMARK(BM_SplitStep4D)->Arg(32);

void BM_PartialTrace(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  MetaWavefunction s = two_coord_state(points);
  for (auto _ : state) {
    ReducedDensityMatrix rho = partial_trace_red(s);
    benchmark::DoNotOptimize(rho.entries.data());
  }
}
BENCHMARK(BM_PartialTrace)->Arg(128)->Arg(256)->Arg(512);

void BM_Visibility(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  Grid g(2, points, 32.0);
  auto a = gaussian_packet(points, g.extent, -6.0, 1.0, 0.0);
  auto b = gaussian_packet(points, g.extent, 6.0, 1.0, 0.0);
  std::vector<Complex> f(a.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = a[i] + b[i];
  ReducedDensityMatrix rho = partial_trace_red(product_state(g, {f, f}));
  const Region ra{0, points / 2}, rb{points / 2, points};
  for (auto _ : state)
    benchmark::DoNotOptimize(coherence_visibility(rho, ra, rb));
}
BENCHMARK(BM_Visibility)->Arg(256)->Arg(512);

void BM_NumerovGroundState(benchmark::State& state) {
  RadialProblem p;
  p.reduced_mass = 0.5;
  p.potential = [](double r) { return -1.0 / r; };
  p.r_max = 60.0;
  p.mesh_points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto gs = ground_state(p);
    benchmark::DoNotOptimize(gs->energy);
  }
}
BENCHMARK(BM_NumerovGroundState)->Arg(10000)->Arg(40000);

void BM_SphereMonteCarlo(benchmark::State& state) {
  SpherePairPotential pot(1.0, 1.0, 1.0);
  const std::int64_t samples = state.range(0);
  for (auto _ : state) {
    MonteCarloEnergy e = pot.numeric_energy(0.7, samples, 42);
    benchmark::DoNotOptimize(e.energy);
  }
  state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_SphereMonteCarlo)->Arg(100000)->Arg(1000000);

}  // namespace

BENCHMARK_MAIN();
