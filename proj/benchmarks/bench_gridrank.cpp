// Copyright 2026 The gridrank Authors.
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

#include <vector>

#include "gridrank/schedulers.hpp"
#include "gridrank/simulator.hpp"
#include "gridrank/traces.hpp"

using namespace gridrank;

namespace {

constexpr double kH = kSecondsPerHour;

std::vector<ResourceRecord> grid_of(std::size_t n) {
  CatalogSpec spec;
  spec.classes = {{"DESKTOP", static_cast<int>(n), 2e9, 2, false, 0.15, "desk"}};
  return generate_catalog(spec, 1);
}

ChurnModel desktop_churn() {
  ChurnModel m;
  m.fallback.family = ChurnFamily::kExponential;
  m.fallback.mean_up = 2 * kH;
  m.fallback.mean_down = 1 * kH;
  m.fallback.heterogeneity = 1.5;
  return m;
}

// One scheduling pass: a queue of 64 jobs over n free machines.
void BM_GrvSelect(benchmark::State& state) {
  const auto grid = grid_of(static_cast<std::size_t>(state.range(0)));
  std::vector<JobRecord> jobs;
  std::vector<JobId> queue;
  for (std::uint32_t i = 0; i < 64; ++i) {
    JobRecord j;
    j.id = JobId{i};
    j.work = 1e13;
    jobs.push_back(j);
    queue.push_back(j.id);
  }
  const std::vector<std::uint8_t> up(grid.size(), 1);
  const GridView view{grid, jobs, up};
  GrvTable table(grid, GrvParams{}, WeightVector{});
  for (std::uint32_t i = 0; i < grid.size(); ++i) table.on_join(ResourceId{i}, (i % 97) * 60.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grv_select(queue, view, table, 100 * kH));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queue.size()));
}
BENCHMARK(BM_GrvSelect)->RangeMultiplier(4)->Range(8, 2048);

void BM_FcfsSelect(benchmark::State& state) {
  const auto grid = grid_of(static_cast<std::size_t>(state.range(0)));
  std::vector<JobRecord> jobs;
  std::vector<JobId> queue;
  for (std::uint32_t i = 0; i < 64; ++i) {
    JobRecord j;
    j.id = JobId{i};
    j.work = 1e13;
    jobs.push_back(j);
    queue.push_back(j.id);
  }
  const std::vector<std::uint8_t> up(grid.size(), 1);
  const GridView view{grid, jobs, up};
  for (auto _ : state) benchmark::DoNotOptimize(fcfs_select(queue, view, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queue.size()));
}
BENCHMARK(BM_FcfsSelect)->RangeMultiplier(4)->Range(8, 2048);

void BM_GenerateChurn(benchmark::State& state) {
  const auto catalog = load_catalog(GRIDRANK_DATA_DIR "/table1.catalog");
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_churn(catalog, desktop_churn(), 1000 * kH, 3));
  }
}
BENCHMARK(BM_GenerateChurn)->Unit(benchmark::kMillisecond);

// Full engine run on the 546-machine census.
void BM_Engine(benchmark::State& state) {
  const auto catalog = load_catalog(GRIDRANK_DATA_DIR "/table1.catalog");
  WorkloadSpec spec;
  spec.jobs = static_cast<std::size_t>(state.range(1));
  spec.arrival = ArrivalMode::kSweeps;
  spec.sweep_size = 25;
  spec.mean_interarrival = 2.5 * kH;
  spec.work_median = 3.6e13;
  spec.work_sigma = 0.3;
  const auto jobs = generate_workload(spec, 1);
  PolicyConfig cfg;
  cfg.kind = static_cast<PolicyKind>(state.range(0));
  EngineOptions options;
  options.horizon = 1000 * kH;
  std::uint64_t events = 0;
  for (auto _ : state) {
    auto policy = make_policy(cfg, catalog);
    const SimResult r = run(catalog, jobs, *policy, desktop_churn(), options, 1);
    events += r.events;
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Engine)
    ->ArgNames({"policy", "jobs"})
    ->Args({0, 1000})
    ->Args({1, 1000})
    ->Args({0, 6004})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
