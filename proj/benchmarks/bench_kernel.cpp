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

#include "stablelab/heat_kernel.hpp"

namespace {

using namespace stablelab;

void KernelSynthesis(benchmark::State& state) {
  auto sym = heat::frozen_symbol({1.0}, 1, 1.0);
  const spectral::GridSpec g{1, std::size_t(state.range(0)), 64.0};
  for (auto _ : state) {
    auto slice = heat::kernel(sym, 0.0, 1.0, g);
    benchmark::DoNotOptimize(slice.density.values().data());
  }
}
BENCHMARK(KernelSynthesis)->Arg(1024)->Arg(4096);

void MomentIntegral(benchmark::State& state) {
  auto sym = heat::frozen_symbol({1.0}, 1, 1.5);
  const spectral::GridSpec g{1, 8192, 64.0};
  auto slice = heat::kernel(sym, 0.0, 1.0, g);
  for (auto _ : state) {
    auto m = heat::moment_integral(slice, int(state.range(0)), 0.0);
    benchmark::DoNotOptimize(m.value);
  }
}
BENCHMARK(MomentIntegral)->Arg(0)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
