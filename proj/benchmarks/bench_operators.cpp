#include <benchmark/benchmark.h>

#include <random>

#include "xhodge/operators.hpp"
#include "xhodge/sampling.hpp"
#include "xhodge/vector_potential.hpp"

using namespace xhodge;

namespace {

TopologyPtr ball(int n) { return build_domain({4.0, n, Ball{{0, 0, 0}, 1.0}}); }

FaceField fourier(const TopologyPtr& t) {
  std::mt19937_64 rng(1);
  return sample_fourier(t, FourierField::random(rng, t->L()));
}

void BM_BuildDomain(benchmark::State& state) {
  const int n = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_domain({4.0, n, SolidTorus{}}));
}
BENCHMARK(BM_BuildDomain)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Divergence(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const FaceField u = fourier(t);
  for (auto _ : state) benchmark::DoNotOptimize(divergence(u));
  state.SetItemsProcessed(state.iterations() * std::int64_t(t->size(Entity::Cell)));
}
BENCHMARK(BM_Divergence)->Arg(32)->Arg(64);

void BM_CurlFaceToEdge(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const FaceField u = fourier(t);
  for (auto _ : state) benchmark::DoNotOptimize(curl_face_to_edge(u));
  state.SetItemsProcessed(state.iterations() * std::int64_t(t->size(Entity::Edge)));
}
BENCHMARK(BM_CurlFaceToEdge)->Arg(32)->Arg(64);

void BM_NegLaplacian(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const ScalarField q = sample_ball_q0(t, 1.0);
  const ScalarBoundaryCondition bc = ScalarBoundaryCondition::dirichlet(*t, 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(neg_laplacian(q, bc));
  state.SetItemsProcessed(state.iterations() * std::int64_t(t->size(Entity::Cell)));
}
BENCHMARK(BM_NegLaplacian)->Arg(32)->Arg(64);

void BM_CurlCurlApply(benchmark::State& state) {
  const TopologyPtr t = ball(int(state.range(0)));
  const auto flavor = state.range(1) ? PotentialFlavor::XFlavor : PotentialFlavor::VFlavor;
  const LinearOperator A = assemble_curlcurl_operator(t, flavor);
  const EdgeField rhs = curlcurl_rhs(fourier(t), flavor);
  Vector y;
  for (auto _ : state) {
    A.apply(rhs.raw(), y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(A.dim));
}
BENCHMARK(BM_CurlCurlApply)->Args({32, 0})->Args({32, 1})->Args({64, 0});

void BM_PairwiseDot(benchmark::State& state) {
  std::vector<double> a(std::size_t(state.range(0)), 0.5), b(a.size(), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_dot(a, b));
  state.SetBytesProcessed(state.iterations() * std::int64_t(16 * a.size()));
}
BENCHMARK(BM_PairwiseDot)->Arg(1 << 16)->Arg(1 << 20);

}  // namespace
