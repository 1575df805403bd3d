/*
 * Copyright (c) 2026, The mbreg Authors
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

#include <algorithm>

#include "mbreg/checker.hpp"
#include "mbreg/sim.hpp"

namespace {

using namespace mbreg;

SimOptions RandomRun(ModelId m, int f, Round rounds) {
  SimOptions o;
  o.config = MakeConfig(m, Lookup(m).alpha * f + 1, f);
  o.clients = 4;
  o.rounds = rounds;
  o.seed = 17;
  o.strategy = Strategy::Of(Strategy::Kind::kRandomWalk);
  o.workload = GenerateRandomWorkload(o.clients, rounds, o.seed, {});
  return o;
}

void BM_SimRounds(benchmark::State& state) {
  const auto m = static_cast<ModelId>(state.range(0));
  const SimOptions o = RandomRun(m, static_cast<int>(state.range(1)), 200);
  for (auto _ : state) {
    SimResult r = Run(o);
    benchmark::DoNotOptimize(r.history.operations.data());
  }
  state.SetItemsProcessed(state.iterations() * o.rounds);
  state.SetLabel(std::string(ModelLabel(m)));
}
BENCHMARK(BM_SimRounds)
    ->ArgsProduct({{0, 1, 2, 3}, {1, 3}})
    ->Unit(benchmark::kMillisecond);

void BM_SimHashedTrace(benchmark::State& state) {
  SimOptions o = RandomRun(ModelId::kSasaki, 2, 200);
  for (auto _ : state) {
    HashingTraceSink sink;
    o.trace = &sink;
    Run(o);
    benchmark::DoNotOptimize(sink.digest());
  }
  state.SetItemsProcessed(state.iterations() * o.rounds);
}
BENCHMARK(BM_SimHashedTrace)->Unit(benchmark::kMillisecond);

History LongHistory(Round rounds, std::uint64_t seed = 17) {
  SimOptions o = RandomRun(ModelId::kGaray, 2, rounds);
  o.seed = seed;
  o.workload = GenerateRandomWorkload(o.clients, rounds, seed, {});
  return Run(o).history;
}

void BM_CheckAll(benchmark::State& state) {
  const History h = LongHistory(static_cast<Round>(state.range(0)));
  for (auto _ : state) {
    auto v = CheckAll(h);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * h.operations.size());
}
BENCHMARK(BM_CheckAll)->Arg(100)->Arg(1000)->Arg(5000);

// Small-history ordering: the cluster graph check against exhaustive search.
std::vector<History> SmallHistories() {
  std::vector<History> out;
  for (std::uint64_t seed = 1; out.size() < 64; ++seed) {
    History h = LongHistory(12, seed);
    h.operations.resize(std::min<std::size_t>(h.operations.size(), 8));
    if (!h.operations.empty()) out.push_back(h);
  }
  return out;
}

void BM_OrderingSmall(benchmark::State& state) {
  const auto histories = SmallHistories();
  for (auto _ : state) {
    for (const auto& h : histories) benchmark::DoNotOptimize(CheckOrdering(h).passed);
  }
  state.SetItemsProcessed(state.iterations() * histories.size());
}
BENCHMARK(BM_OrderingSmall);

void BM_BruteForceSmall(benchmark::State& state) {
  const auto histories = SmallHistories();
  for (auto _ : state) {
    for (const auto& h : histories) benchmark::DoNotOptimize(BruteForceLinearizable(h));
  }
  state.SetItemsProcessed(state.iterations() * histories.size());
}
BENCHMARK(BM_BruteForceSmall);

}  // namespace

BENCHMARK_MAIN();
