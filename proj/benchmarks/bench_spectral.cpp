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

#include <numbers>

#include "stablelab/spectral.hpp"

namespace {

using namespace stablelab::spectral;

void BlockApply(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  const GridSpec g{1, n, std::numbers::pi};
  DyadicDecomposition dec(1, n);
  GridFunction f = make_rough_noise(g, 1);
  int j = 3;
  for (auto _ : state) {
    auto b = block(j, f, dec);
    benchmark::DoNotOptimize(b.values().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BlockApply)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BesovNormInfInf(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  const GridSpec g{1, n, std::numbers::pi};
  DyadicDecomposition dec(1, n);
  GridFunction f = make_weierstrass(g, 0.5, 9, 3);
  const double inf = std::numeric_limits<double>::infinity();
  for (auto _ : state) {
    double v = besov_norm(f, 0.5, inf, inf, dec);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BesovNormInfInf)->Arg(1024)->Arg(4096);

void HolderNorm(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  const GridSpec g{1, n, std::numbers::pi};
  GridFunction f = make_weierstrass(g, 0.5, 9, 3);
  for (auto _ : state) {
    double v = holder_norm(f, 0.5);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(HolderNorm)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
