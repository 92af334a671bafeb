#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pxg/functional.hpp"
#include "pxg/graph.hpp"
#include "pxg/pointproc.hpp"
#include "pxg/stabilize.hpp"
#include "pxg/stats.hpp"

namespace {

using namespace pxg;

const Window kDisc = Window::ball({0.0, 0.0}, 1.0);

void BM_BuildNaive(benchmark::State& state) {
  const auto cloud = sample_poisson(kDisc, static_cast<double>(state.range(0)), 1);
  const auto f = ForbiddenRegionFamily::gabriel(2);
  for (auto _ : state) benchmark::DoNotOptimize(build_naive(cloud, f));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(cloud.size()));
}
BENCHMARK(BM_BuildNaive)->RangeMultiplier(2)->Range(64, 256)->Complexity();

void BM_BuildAccelerated(benchmark::State& state) {
  const auto cloud = sample_poisson(kDisc, static_cast<double>(state.range(0)), 1);
  const auto f = state.range(1) ? ForbiddenRegionFamily::relative_neighborhood(2) : ForbiddenRegionFamily::gabriel(2);
  for (auto _ : state) benchmark::DoNotOptimize(build_accelerated(cloud, f));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(cloud.size()));
}
BENCHMARK(BM_BuildAccelerated)->ArgsProduct({{250, 1000, 4000, 16000}, {0, 1}});

void BM_AddOneCost(benchmark::State& state) {
  const auto cloud = sample_poisson(kDisc, 2000.0, 2);
  const auto f = ForbiddenRegionFamily::gabriel(2);
  const auto g = build_accelerated(cloud, f);
  const InsertionProbe probe(cloud.points, g, f);
  const auto w = WeightSpec::power(1.0);
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(add_one_cost(probe, w, {u(eng), u(eng)}));
}
BENCHMARK(BM_AddOneCost);

void BM_EstimateRadius(benchmark::State& state) {
  const auto cloud = sample_poisson(kDisc, static_cast<double>(state.range(0)), 4);
  const auto f = ForbiddenRegionFamily::gabriel(2);
  const double h = default_resolution(kDisc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_radius(cloud.points, kDisc, f, BaseSet::point({0.0, 0.0}), h));
  }
}
BENCHMARK(BM_EstimateRadius)->Arg(100)->Arg(500)->Arg(2000);

void BM_Kolmogorov(benchmark::State& state) {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> n;
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) x = n(eng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(empirical_kolmogorov(xs));
    benchmark::DoNotOptimize(empirical_wasserstein1(xs));
  }
}
BENCHMARK(BM_Kolmogorov)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
