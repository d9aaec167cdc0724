/*
   Copyright 2026 the stablelab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "stablelab/sde_engine.hpp"

namespace {

using namespace stablelab;

void EulerDiagSine(benchmark::State& state) {
  auto model = sde::make_preset("diag-sine", 1);
  auto spec = noise::StableSpec::make(1.5, 1);
  const std::size_t paths = std::size_t(state.range(0));
  for (auto _ : state) {
    auto batch = sde::simulate(model, spec, 0.0, 0.25, {{0.0}}, 64, paths, 9);
    benchmark::DoNotOptimize(batch.terminal.data());
  }
  state.SetItemsProcessed(state.iterations() * int64_t(paths) * 64);
}
BENCHMARK(EulerDiagSine)->Range(1 << 10, 1 << 14);

void EulerHolderDrift(benchmark::State& state) {
  auto model = sde::make_preset("holder-drift", 1);
  auto spec = noise::StableSpec::make(1.5, 1);
  for (auto _ : state) {
    auto batch = sde::simulate(model, spec, 0.0, 0.25, {{0.0}}, 64, 4096, 9);
    benchmark::DoNotOptimize(batch.terminal.data());
  }
  state.SetItemsProcessed(state.iterations() * 4096 * 64);
}
BENCHMARK(EulerHolderDrift);

}  // namespace

BENCHMARK_MAIN();
