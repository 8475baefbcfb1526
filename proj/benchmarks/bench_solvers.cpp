#include <benchmark/benchmark.h>

#include <random>

#include "xhodge/decompose.hpp"

using namespace xhodge;

namespace {

TopologyPtr ball(int n) { return build_domain({4.0, n, Ball{{0, 0, 0}, 1.0}}); }

FaceField fourier(const TopologyPtr& t) {
  std::mt19937_64 rng(1);
  return sample_fourier(t, FourierField::random(rng, t->L()));
}

void BM_WeakNeumann(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const FaceField u = fourier(t);
  int iters = 0;
  for (auto _ : state) iters = solve_weak_neumann(u).stats.iterations;
  state.counters["cg_iterations"] = iters;
}
BENCHMARK(BM_WeakNeumann)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CapacityPotential(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  int iters = 0;
  for (auto _ : state) iters = solve_q0(t).stats.iterations;
  state.counters["cg_iterations"] = iters;
}
BENCHMARK(BM_CapacityPotential)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_VectorPotential(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const auto flavor = state.range(1) ? PotentialFlavor::XFlavor : PotentialFlavor::VFlavor;
  const FaceField u = fourier(t);
  int iters = 0;
  for (auto _ : state) iters = solve_vector_potential(u, flavor).stats.iterations;
  state.counters["cg_iterations"] = iters;
}
BENCHMARK(BM_VectorPotential)->Args({24, 0})->Args({24, 1})->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const FaceField u = fourier(t);
  const auto flavor = state.range(1) ? HarmonicFlavor::TangentialHarmonic : HarmonicFlavor::NormalHarmonic;
  const FarMode far = state.range(1) ? FarMode::FreeConstant : FarMode::NaturalNeumann;
  for (auto _ : state) benchmark::DoNotOptimize(decompose(u, flavor, far));
}
BENCHMARK(BM_Decompose)->Args({24, 0})->Args({24, 1})->Unit(benchmark::kMillisecond);

}  // namespace
