// Copyright 2026 The alipmpc Authors
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

#include <filesystem>
#include <vector>

#include <benchmark/benchmark.h>

#include "alipmpc/mpc.hpp"
#include "alipmpc/simulator.hpp"

namespace {

using namespace alipmpc;

std::vector<Scenario> batch(int copies) {
  std::vector<Scenario> out;
  for (const char* name : {"periodic", "lateral_slope_5deg", "speed_change", "disturbed_exact"}) {
    Scenario sc = load_scenario(std::filesystem::path(ALIPMPC_SCENARIO_DIR) /
                                (std::string(name) + ".yaml"));
    sc.duration = 1.8;
    for (int k = 0; k < copies; ++k) {
      sc.controller.mpc.horizon_steps = 2 + k % 4;
      out.push_back(sc);
    }
  }
  return out;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto scenarios = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batch_serial(scenarios));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(scenarios.size()));
}

void BM_BatchParallel(benchmark::State& state) {
  const auto scenarios = batch(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batch(scenarios));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(scenarios.size()));
}

BENCHMARK(BM_BatchSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PlanFootsteps(benchmark::State& state) {
  const RobotParams p;
  const TerrainPlane t;
  MpcConfig cfg;
  cfg.horizon_steps = static_cast<int>(state.range(0));
  cfg.Q_f = dare_terminal_cost(p, t, cfg.Q_step).P;
  GaitCommand cmd;
  cmd.vx_des = 1.0;
  const AlipState x(0.02, -0.12, -5.0, 24.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_footsteps(x, 0.2, cmd, Stance::kLeft, cfg, p, t));
  }
}

BENCHMARK(BM_PlanFootsteps)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
