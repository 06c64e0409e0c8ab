/*
 *  Copyright 2026 The wbwfsim Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "wbwf/planner.hpp"

namespace {

void BM_PlanConfigurations(benchmark::State& state)
{
    const wbwf::PlannerInput input = wbwf::reference_planner_input();
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::plan_configurations(input));
    }
}
BENCHMARK(BM_PlanConfigurations);

void BM_ValidateConfig(benchmark::State& state)
{
    const wbwf::PlannerInput input = wbwf::reference_planner_input();
    const wbwf::TdmaConfig cfg = wbwf::table1_solution(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::validate_config(cfg, input));
    }
}
BENCHMARK(BM_ValidateConfig);

void BM_SlotSchedule(benchmark::State& state)
{
    const wbwf::TdmaConfig cfg = wbwf::table1_solution(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::slot_schedule(cfg));
    }
}
BENCHMARK(BM_SlotSchedule);

} // namespace

BENCHMARK_MAIN();
