#include <benchmark/benchmark.h>

#include "depot3d/package.hpp"
#include "support.hpp"

using namespace depot3d;
namespace fs = std::filesystem;

static void BM_BuildAndVerify(benchmark::State& state) {
  std::map<std::string, std::string> files;
  const auto d = testing::generated_deposit(1, static_cast<std::size_t>(state.range(0)), files);
  testing::TempDir tmp;
  const auto created = std::chrono::system_clock::now();
  int n = 0;
  for (auto _ : state) {
    auto root = tmp / ("p" + std::to_string(n++));
    auto pkg = build_package(d, files, root, created);
    benchmark::DoNotOptimize(verify_package(pkg.root));
    state.PauseTiming();
    fs::remove_all(root);
    state.ResumeTiming();
  }
}
BENCHMARK(BM_BuildAndVerify)->Arg(1)->Arg(10);

static void BM_PackageDigest(benchmark::State& state) {
  Manifest m;
  m.created = "2024-01-01T00:00:00Z";
  for (int i = 0; i < state.range(0); ++i)
    m.entries.push_back({"objects/1/files/f" + std::to_string(i), 100, std::string(64, 'a'), FormatClass::Archivable});
  for (auto _ : state) benchmark::DoNotOptimize(compute_package_digest(m));
}
BENCHMARK(BM_PackageDigest)->Arg(10)->Arg(1000);
