/*
 * Copyright 2026 The lostpennies Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "tlp/abmn.hpp"
#include "tlp/bboost.hpp"
#include "tlp/phimaps.hpp"
#include "tlp/sim.hpp"

namespace {

void BM_BasicQuad(benchmark::State& state) {
  const tlp::GameParams p(0.7, 0.9);
  double beta = 1.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlp::basic_quad(p, beta));
    beta += 1e-9;
  }
}
BENCHMARK(BM_BasicQuad);

void BM_SOrbit(benchmark::State& state) {
  const tlp::GameParams p(0.5, 1.0);
  const int len = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tlp::s_orbit(p, 1.2, len, len));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SOrbit)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oN);

void BM_DefaultSolution(benchmark::State& state) {
  const tlp::GameParams p(0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(tlp::default_solution(p, 1.0, 260));
}
BENCHMARK(BM_DefaultSolution);

void BM_MinaMargin(benchmark::State& state) {
  const tlp::GameParams p(state.range(0) / 100.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(tlp::mina_margin(p, 1.3));
}
BENCHMARK(BM_MinaMargin)->Arg(25)->Arg(90)->Arg(100);

void BM_LambdaMax(benchmark::State& state) {
  tlp::LambdaMaxOptions o;
  o.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tlp::lambda_max(tlp::GameParams(1.0, 1.0), o));
}
BENCHMARK(BM_LambdaMax)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MarginRoots(benchmark::State& state) {
  const tlp::GameParams p(0.9, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(tlp::margin_roots(p, 9, 9, 1.0, 145.0));
}
BENCHMARK(BM_MarginRoots)->Unit(benchmark::kMillisecond);

void BM_Flow(benchmark::State& state) {
  double u = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlp::flow(0.8, 1.5, u));
    u += 1e-9;
  }
}
BENCHMARK(BM_Flow);

void BM_OdePair(benchmark::State& state) {
  double r = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlp::ode_pair(1.0, 1.0, r));
    r += 1e-9;
  }
}
BENCHMARK(BM_OdePair)->Unit(benchmark::kMicrosecond);

void BM_PrizeTotals(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tlp::prize_totals(1.0, 2.0));
}
BENCHMARK(BM_PrizeTotals)->Unit(benchmark::kMillisecond);

void BM_PlayTlp(benchmark::State& state) {
  const tlp::GameParams p(0.5, 1.0);
  const auto w = tlp::standard_solution(p, 1.0, 60);
  const auto prof = tlp::StakeProfile::from_window(w);
  tlp::SimConfig c;
  c.n_neg_inf = w.n_neg_inf_total();
  std::uint64_t k = 0;
  long turns = 0;
  for (auto _ : state) {
    tlp::Rng rng(tlp::mix_seed(1, k++));
    const auto t = tlp::play_tlp(p, prof, 0, c, rng);
    turns += t.turns;
    benchmark::DoNotOptimize(t.p_plus);
  }
  state.counters["turns_per_game"] =
      benchmark::Counter(static_cast<double>(turns), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_PlayTlp)->Unit(benchmark::kMicrosecond);

void BM_SdePath(benchmark::State& state) {
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tlp::simulate_sde(1.0, 0.0, 5.0, 0.01, k++));
}
BENCHMARK(BM_SdePath)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
