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

#include "wbwf/codec.hpp"
#include "wbwf/pdu.hpp"
#include "wbwf/planner.hpp"

namespace {

wbwf::MacPdu make_rt_pdu(const wbwf::TdmaConfig& cfg)
{
    wbwf::MacPdu pdu;
    pdu.header.fc.type = wbwf::PduType::RT_DATA;
    pdu.header.fc.cycle_type = wbwf::CycleType::RT;
    pdu.header.fc.slot_id_in_cycle = 5;
    pdu.header.fc.slot_id_in_frame =
        static_cast<std::uint16_t>(cfg.region_base(wbwf::SlotKind::RT) + 5);
    pdu.header.transmitter = 0x020000000001ULL;
    pdu.header.receiver = wbwf::kBroadcastAddress;
    pdu.header.sequence = 7;
    wbwf::RtDataBody body;
    for (int i = 0; i < cfg.rt_voice_frames_per_slot; ++i) {
        body.voice_frames.push_back(static_cast<std::uint64_t>(i + 1));
    }
    pdu.header.fc.encapsulated_sdus = static_cast<std::uint8_t>(body.voice_frames.size());
    pdu.body = body;
    return pdu;
}

void BM_EncodeRtData(benchmark::State& state)
{
    const wbwf::TdmaConfig cfg = wbwf::table1_solution(3);
    const wbwf::MacPdu pdu = make_rt_pdu(cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::encode(pdu, cfg));
    }
}
BENCHMARK(BM_EncodeRtData);

void BM_DecodeRtData(benchmark::State& state)
{
    const wbwf::TdmaConfig cfg = wbwf::table1_solution(3);
    const wbwf::BitString bits = wbwf::encode(make_rt_pdu(cfg), cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::decode(bits, cfg, wbwf::SlotKind::RT));
    }
}
BENCHMARK(BM_DecodeRtData);

void BM_EncodeMgmt(benchmark::State& state)
{
    const wbwf::TdmaConfig cfg = wbwf::table1_solution(3);
    wbwf::MacPdu pdu;
    pdu.header.fc.type = wbwf::PduType::MGMT;
    pdu.header.fc.cycle_type = wbwf::CycleType::MGMT;
    pdu.header.transmitter = 0x020000000001ULL;
    pdu.header.receiver = wbwf::kBroadcastAddress;
    wbwf::MgmtBody body;
    body.bitmap = wbwf::SlotBitmap::idle(cfg.data_slots_per_cycle());
    pdu.body = body;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wbwf::encode(pdu, cfg));
    }
}
BENCHMARK(BM_EncodeMgmt);

} // namespace

BENCHMARK_MAIN();
