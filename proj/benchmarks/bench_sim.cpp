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

#include <cstdint>

#include "wbwf/channel.hpp"
#include "wbwf/scenario.hpp"
#include "wbwf/sim.hpp"

namespace {

/* A ring of nodes on an ideal channel, two of them talking. */
wbwf::Scenario make_scenario(int nodes, std::int64_t duration_us)
{
    wbwf::Scenario s;
    s.duration_us = duration_us;
    s.seed = 7;
    s.tdma = wbwf::table1_solution(3);
    s.channel = wbwf::ChannelParams{};
    s.channel.ber_table = {{0.0, 0.0}};
    for (int i = 0; i < nodes; ++i) {
        wbwf::NodeSpec node;
        node.index = i;
        node.x_m = 100.0 * i;
        node.y_m = (i % 2) ? 50.0 : 0.0;
        node.mgmt_slot = i;
        s.nodes.push_back(node);
    }
    s.presses.push_back({0, 0, duration_us - 200000, -1});
    s.presses.push_back({nodes / 2, 10000, duration_us - 300000, -1});
    return s;
}

void BM_RunOneSecond(benchmark::State& state)
{
    const wbwf::Scenario s = make_scenario(static_cast<int>(state.range(0)), 1000000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::run(s, /*with_trace=*/false));
    }
}
BENCHMARK(BM_RunOneSecond)->Arg(2)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_RunWithTrace(benchmark::State& state)
{
    const wbwf::Scenario s = make_scenario(10, 1000000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::run(s, /*with_trace=*/true));
    }
}
BENCHMARK(BM_RunWithTrace)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
