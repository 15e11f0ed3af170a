#include <benchmark/benchmark.h>

#include "depot3d/formats.hpp"
#include "support.hpp"

using namespace depot3d;

static void BM_Decimate(benchmark::State& state) {
  const auto cloud = testing::point_cloud(static_cast<std::size_t>(state.range(0)), 5);
  const auto target = static_cast<std::uint64_t>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(decimate(cloud, target, ++seed));
  state.SetItemsProcessed(state.range(0) * state.iterations());
}
BENCHMARK(BM_Decimate)->Args({10000, 1000})->Args({100000, 10000})->Args({1000000, 50000});
