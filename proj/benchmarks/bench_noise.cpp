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

#include "stablelab/philox.hpp"
#include "stablelab/stable_noise.hpp"

namespace {

void PhiloxBlock(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    auto r = stablelab::uniforms_at(42, i++, 0, 0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(PhiloxBlock);

void StableDraw(benchmark::State& state) {
  const double alpha = double(state.range(0)) / 10.0;
  std::uint64_t i = 0;
  for (auto _ : state) {
    double x = stablelab::noise::standard_stable_at(alpha, 42, i++, 0, 0);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(StableDraw)->Arg(7)->Arg(10)->Arg(15);

void IncrementMatrix(benchmark::State& state) {
  auto spec = stablelab::noise::StableSpec::make(1.5, 2);
  for (auto _ : state) {
    auto m = stablelab::noise::sample_increments(spec, 1e-3,
                                                 std::size_t(state.range(0)), 1);
    benchmark::DoNotOptimize(m.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(IncrementMatrix)->Range(1 << 10, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
