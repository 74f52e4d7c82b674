// Copyright 2026 The Meaning Games Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "generators.h"
#include "meaning/equilibrium.h"

namespace {

meaning::MeaningGame Instance(size_t n) {
  gen::Rng rng(n);
  return gen::AssortativeInstance(rng, n, 1.0, 0.9);
}

void BM_Enumerate(benchmark::State& state) {
  const auto g = Instance(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(meaning::EnumeratePureEquilibria(g));
  }
  state.counters["profiles"] =
      static_cast<double>(meaning::CountPureProfiles(g));
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto g = Instance(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(meaning::EnumeratePureEquilibriaSerial(g));
  }
  state.counters["profiles"] =
      static_cast<double>(meaning::CountPureProfiles(g));
}

}  // namespace

BENCHMARK(BM_Enumerate)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateSerial)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
