#include <benchmark/benchmark.h>

#include "depot3d/identifiers.hpp"

using namespace depot3d;

static void BM_FormatPid(benchmark::State& state) {
  PersistentIdentifier p{"10.34969", "CND3D", 257350, PidKind::Deposit, 2015};
  for (auto _ : state) benchmark::DoNotOptimize(format(p));
}
BENCHMARK(BM_FormatPid);

static void BM_ParsePid(benchmark::State& state) {
  const std::string s = "10.34969/CND3D/500986.d.2021";
  for (auto _ : state) benchmark::DoNotOptimize(parse_pid(s));
}
BENCHMARK(BM_ParsePid);

static void BM_MintNext(benchmark::State& state) {
  PidRegistry reg;
  for (auto _ : state) benchmark::DoNotOptimize(reg.mint_next(PidKind::Object, 2024));
}
BENCHMARK(BM_MintNext);
