#include <benchmark/benchmark.h>

#include "depot3d/formats.hpp"
#include "support.hpp"

using namespace depot3d;

namespace {

PlyEncoding encoding_arg(const benchmark::State& state) { return static_cast<PlyEncoding>(state.range(1)); }

}  // namespace

static void BM_PlyWrite(benchmark::State& state) {
  const auto cloud = testing::point_cloud(static_cast<std::size_t>(state.range(0)), 3);
  std::size_t bytes = 0;
  for (auto _ : state) {
    auto out = write_ply(cloud, encoding_arg(state));
    bytes += out.size();
    benchmark::DoNotOptimize(out);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_PlyWrite)->ArgsProduct({{1000, 100000}, {0, 1, 2}});

static void BM_PlyParse(benchmark::State& state) {
  const auto bytes = write_ply(testing::point_cloud(static_cast<std::size_t>(state.range(0)), 3), encoding_arg(state));
  for (auto _ : state) benchmark::DoNotOptimize(parse_ply(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes.size() * state.iterations()));
}
BENCHMARK(BM_PlyParse)->ArgsProduct({{1000, 100000}, {0, 1, 2}});

static void BM_Classify(benchmark::State& state) {
  const auto bytes = write_ply(testing::point_cloud(10000, 3), PlyEncoding::BinaryLittleEndian);
  for (auto _ : state) benchmark::DoNotOptimize(classify("cloud.ply", bytes));
}
BENCHMARK(BM_Classify);
