// Copyright 2026 The pushswitch Authors
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

// Serial vs OpenMP episode evaluation, plus the per-step MPC solve.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "pushswitch/bench.hpp"

using namespace pushswitch;

namespace {

PolicySpec net_spec() {
  PolicySpec spec;
  spec.kind = PolicyKind::kNet;
  spec.net = QNet::random(11);
  spec.episode.max_rounds = 10;
  return spec;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto seeds = seed_list(5, static_cast<std::size_t>(state.range(0)));
  const auto run = policy_runner(net_spec());
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_serial(run, seeds, {"serial", "T", 0}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto seeds = seed_list(5, static_cast<std::size_t>(state.range(0)));
  const auto run = policy_runner(net_spec());
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(run, seeds, {"omp", "T", 0}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_MpcSolve(benchmark::State& state) {
  Plant plant(builtin_shape(ShapeName::kT), MotionModel{}, NoiseModel{},
              Pose2D(0.1, 0.1, 0.3));
  const Pose2D goal;
  const Mcr mcr = build_mcr(com_world(plant.pose(), plant.shape()),
                            com_world(goal, plant.shape()), 0.03, 1.0 / 3.0);
  const MpcProblem problem = make_problem(plant, 1, goal, mcr, MpcConfig{});
  MpcSolver solver;
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(problem));
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MpcSolve)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
