// Copyright 2026 The hdrsim Authors
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

// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include "hdr/evaluation.hpp"
#include "hdr/snr_diagnostic.hpp"
#include "hdr/tabular_mdp.hpp"

#include <benchmark/benchmark.h>

namespace
{

hdr::ExecutionMode mode_of(const benchmark::State & st)
{
  return st.range(0) == 0 ? hdr::ExecutionMode::Serial : hdr::ExecutionMode::Parallel;
}

void BM_ValueIteration(benchmark::State & st)
{
  hdr::Rng rng(3);
  const auto m = hdr::random_mdp(static_cast<int>(st.range(1)), 4, 0.9, rng);
  for (auto _ : st) {
    benchmark::DoNotOptimize(hdr::value_iteration(m, 1e-11, mode_of(st)).Q.data());
  }
  st.SetLabel(std::string(hdr::to_string(mode_of(st))));
}
BENCHMARK(BM_ValueIteration)->Args({0, 200})->Args({1, 200})->Args({0, 800})->Args({1, 800});

void BM_InvarianceBatch(benchmark::State & st)
{
  hdr::BatchSpec spec;
  spec.instances = 50;
  for (auto _ : st) {
    benchmark::DoNotOptimize(hdr::verify_random_batch(spec, mode_of(st)).data());
  }
  st.SetLabel(std::string(hdr::to_string(mode_of(st))));
}
BENCHMARK(BM_InvarianceBatch)->Arg(0)->Arg(1);

void BM_RewardSurface(benchmark::State & st)
{
  const hdr::Experiment ex;
  hdr::SurfaceSpec spec;
  spec.x_step_m = 0.25;
  for (auto _ : st) {
    benchmark::DoNotOptimize(hdr::reward_surface(hdr::RewardVariant::HDR, ex, spec, mode_of(st)).phi.data());
  }
  st.SetLabel(std::string(hdr::to_string(mode_of(st))));
}
BENCHMARK(BM_RewardSurface)->Arg(0)->Arg(1);

void BM_ActionGapProbe(benchmark::State & st)
{
  const hdr::Experiment ex;
  hdr::ProbeSpec ps;
  ps.count = 64;
  const auto states = hdr::sample_probe_states(ex, ps);
  for (auto _ : st) {
    benchmark::DoNotOptimize(
      hdr::action_gap_probe(states, ex, {hdr::RewardVariant::HDR, hdr::RewardVariant::GNR}, mode_of(st)).data());
  }
  st.SetLabel(std::string(hdr::to_string(mode_of(st))));
}
BENCHMARK(BM_ActionGapProbe)->Arg(0)->Arg(1);

void BM_SweepCells(benchmark::State & st)
{
  hdr::Experiment ex;
  ex.search.budget = 20;
  ex.scenario.horizon_s = 5.0;
  const auto seeds = hdr::seed_range(1, 4);
  for (auto _ : st) {
    benchmark::DoNotOptimize(
      hdr::budget_sweep(ex, {10, 20}, {hdr::RewardVariant::HDR}, seeds, mode_of(st)).data());
  }
  st.SetLabel(std::string(hdr::to_string(mode_of(st))));
}
BENCHMARK(BM_SweepCells)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PlanDecision(benchmark::State & st)
{
  hdr::Experiment ex;
  ex.search.budget = static_cast<int>(st.range(0));
  const auto world = hdr::make_initial_world(ex, 5);
  const hdr::RewardStream stream{};
  for (auto _ : st) {
    benchmark::DoNotOptimize(hdr::plan(world, ex.search, ex.sim, ex.reward, stream).size());
  }
}
BENCHMARK(BM_PlanDecision)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
