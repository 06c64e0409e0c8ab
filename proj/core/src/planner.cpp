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

#include "wbwf/planner.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "wbwf/errors.hpp"

namespace wbwf {

namespace {

// Largest BE payload the planner considers: the IPv4 minimum reassembly MTU.
constexpr int kMaxBePayloadBytes = 576;
constexpr int kMaxIndexableSlots = 512; // 9-bit slot id fields
constexpr int kMaxCycleFrames = 8;      // 3-bit frame index

std::int64_t ceil_div(std::int64_t a, std::int64_t b)
{
    return (a + b - 1) / b;
}

} // namespace

const char* to_string(SlotKind kind)
{
    switch (kind) {
    case SlotKind::MGMT: return "mgmt";
    case SlotKind::RT: return "rt";
    case SlotKind::BE: return "be";
    }
    return "?";
}

int TdmaConfig::slot_symbols(SlotKind kind) const
{
    switch (kind) {
    case SlotKind::MGMT: return mgmt_slot_symbols;
    case SlotKind::RT: return rt_slot_symbols;
    case SlotKind::BE: return be_slot_symbols;
    }
    return 0;
}

std::int64_t TdmaConfig::slot_duration_us(SlotKind kind) const
{
    return static_cast<std::int64_t>(slot_symbols(kind)) * ofdm_symbol_duration_us;
}

int TdmaConfig::slot_data_bits(SlotKind kind) const
{
    return (slot_symbols(kind) - slot_overhead_symbols) * bits_per_symbol;
}

int TdmaConfig::cycle_frames(SlotKind kind) const
{
    switch (kind) {
    case SlotKind::MGMT: return mgmt_cycle_frames;
    case SlotKind::RT: return rt_cycle_frames;
    case SlotKind::BE: return be_cycle_frames;
    }
    return 0;
}

int TdmaConfig::region_base(SlotKind kind) const
{
    switch (kind) {
    case SlotKind::MGMT: return 0;
    case SlotKind::RT: return mgmt_slots;
    case SlotKind::BE: return mgmt_slots + rt_slots;
    }
    return 0;
}

int TdmaConfig::slots_in_frame(SlotKind kind) const
{
    switch (kind) {
    case SlotKind::MGMT: return mgmt_slots;
    case SlotKind::RT: return rt_slots;
    case SlotKind::BE: return be_slots;
    }
    return 0;
}

bool ValidationReport::ok() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

std::string ValidationReport::summary() const
{
    std::ostringstream out;
    for (const CheckResult& c : checks) {
        out << (c.pass ? "pass" : "FAIL") << "  " << c.rule;
        if (!c.detail.empty()) {
            out << "  (" << c.detail << ")";
        }
        out << "\n";
    }
    return out.str();
}

int slot_symbols_for_payload(int payload_bits, const PlannerInput& input)
{
    if (payload_bits <= 0) {
        throw std::invalid_argument("payload_bits must be > 0");
    }
    std::int64_t data_symbols =
        ceil_div(input.mac_header_bits + payload_bits, input.bits_per_symbol);
    return static_cast<int>(data_symbols) + input.slot_overhead_symbols;
}

namespace {

/**
 * BE payload candidates: multiples of 8 bytes up to the IPv4 minimum MTU
 * whose PDU fills its slot with zero padding, i.e. header + payload lands
 * exactly on a symbol boundary. Zero fill keeps the widest slots free of
 * dead air, which is how the reference geometries come out.
 */
std::vector<int> be_payload_candidates(const PlannerInput& input)
{
    std::vector<int> out;
    for (int bytes = 8; bytes <= kMaxBePayloadBytes; bytes += 8) {
        if ((input.mac_header_bits + bytes * 8) % input.bits_per_symbol == 0) {
            out.push_back(bytes);
        }
    }
    return out;
}

int voice_frames_per_rt_slot(std::int64_t frame_length_us, int rt_cycle_frames,
                             const PlannerInput& input)
{
    // Design rule: one RT slot occurrence must move every voice frame
    // generated between its occurrences.
    return static_cast<int>(
        ceil_div(frame_length_us * rt_cycle_frames, input.voice_frame_interval_us));
}

} // namespace

std::vector<TdmaConfig> plan_configurations(const PlannerInput& input)
{
    if (input.candidate_frame_lengths_us.empty()) {
        throw ConfigError("planner input has no candidate frame lengths");
    }
    const std::vector<int> be_payloads = be_payload_candidates(input);
    std::vector<TdmaConfig> out;

    for (std::int64_t frame_us : input.candidate_frame_lengths_us) {
        if (frame_us <= 0 || frame_us % input.ofdm_symbol_duration_us != 0) {
            continue; // frames must tile into whole symbols
        }
        const std::int64_t frame_symbols = frame_us / input.ofdm_symbol_duration_us;
        const int v = voice_frames_per_rt_slot(frame_us, 1, input);
        const int rt_sym = slot_symbols_for_payload(v * input.voice_frame_bits, input);

        for (int be_bytes : be_payloads) {
            const int be_sym = slot_symbols_for_payload(be_bytes * 8, input);
            for (int rt = 1; rt * static_cast<std::int64_t>(rt_sym) < frame_symbols; ++rt) {
                const std::int64_t after_rt = frame_symbols - rt * static_cast<std::int64_t>(rt_sym);
                for (int be = 1; be * static_cast<std::int64_t>(be_sym) < after_rt; ++be) {
                    const std::int64_t mgmt_region =
                        after_rt - be * static_cast<std::int64_t>(be_sym);
                    const int pdu_bits = input.mac_header_bits + 2 * (rt + be);
                    const int mgmt_sym = slot_symbols_for_payload(2 * (rt + be), input);
                    if (mgmt_region % mgmt_sym != 0) {
                        continue;
                    }
                    const std::int64_t mgmt = mgmt_region / mgmt_sym;
                    if (mgmt % 2 != 0 || mgmt < input.max_nodes_target) {
                        continue;
                    }
                    if (mgmt > kMaxIndexableSlots
                        || mgmt + rt + be > kMaxIndexableSlots) {
                        continue;
                    }
                    TdmaConfig cfg;
                    cfg.frame_length_us = frame_us;
                    cfg.mgmt_slots = static_cast<int>(mgmt);
                    cfg.rt_slots = rt;
                    cfg.be_slots = be;
                    cfg.mgmt_slot_symbols = mgmt_sym;
                    cfg.rt_slot_symbols = rt_sym;
                    cfg.be_slot_symbols = be_sym;
                    cfg.mgmt_pdu_bits = pdu_bits;
                    cfg.mgmt_padded_bits =
                        (mgmt_sym - input.slot_overhead_symbols) * input.bits_per_symbol
                        - pdu_bits;
                    cfg.rt_voice_frames_per_slot = v;
                    cfg.be_payload_bytes = be_bytes;
                    cfg.ofdm_symbol_duration_us = input.ofdm_symbol_duration_us;
                    cfg.bits_per_symbol = input.bits_per_symbol;
                    cfg.slot_overhead_symbols = input.slot_overhead_symbols;
                    cfg.mac_header_bits = input.mac_header_bits;
                    cfg.voice_frame_bits = input.voice_frame_bits;
                    cfg.voice_frame_interval_us = input.voice_frame_interval_us;
                    out.push_back(cfg);
                }
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const TdmaConfig& a, const TdmaConfig& b) {
        return std::tie(a.frame_length_us, a.mgmt_slots, a.rt_slots, a.be_slots,
                        a.be_payload_bytes)
            < std::tie(b.frame_length_us, b.mgmt_slots, b.rt_slots, b.be_slots,
                       b.be_payload_bytes);
    });
    return out;
}

ValidationReport validate_config(const TdmaConfig& cfg, const PlannerInput& input)
{
    ValidationReport report;
    auto check = [&report](const std::string& rule, bool pass, const std::string& detail) {
        report.checks.push_back({rule, pass, pass ? "" : detail});
    };

    check("positive-counts",
          cfg.mgmt_slots >= 1 && cfg.rt_slots >= 1 && cfg.be_slots >= 1
              && cfg.frame_length_us > 0,
          "every region needs at least one slot and a positive frame length");

    check("input-consistency",
          cfg.ofdm_symbol_duration_us == input.ofdm_symbol_duration_us
              && cfg.bits_per_symbol == input.bits_per_symbol
              && cfg.slot_overhead_symbols == input.slot_overhead_symbols
              && cfg.mac_header_bits == input.mac_header_bits
              && cfg.voice_frame_bits == input.voice_frame_bits
              && cfg.voice_frame_interval_us == input.voice_frame_interval_us
              && input.phy_bit_rate * input.ofdm_symbol_duration_us
                  == static_cast<std::int64_t>(input.bits_per_symbol) * 1000000,
          "config constants disagree with the planner input");

    const bool frame_in_symbols =
        cfg.ofdm_symbol_duration_us > 0
        && cfg.frame_length_us % cfg.ofdm_symbol_duration_us == 0;
    check("integer-symbol-slots",
          frame_in_symbols && cfg.mgmt_slot_symbols > cfg.slot_overhead_symbols
              && cfg.rt_slot_symbols > cfg.slot_overhead_symbols
              && cfg.be_slot_symbols > cfg.slot_overhead_symbols,
          "slot and frame durations must be whole symbols with room for data");

    if (frame_in_symbols) {
        const std::int64_t tiled =
            static_cast<std::int64_t>(cfg.mgmt_slots) * cfg.mgmt_slot_symbols
            + static_cast<std::int64_t>(cfg.rt_slots) * cfg.rt_slot_symbols
            + static_cast<std::int64_t>(cfg.be_slots) * cfg.be_slot_symbols;
        const std::int64_t frame_symbols = cfg.frame_length_us / cfg.ofdm_symbol_duration_us;
        check("frame-tiling", tiled == frame_symbols,
              std::to_string(tiled) + " slot symbols vs " + std::to_string(frame_symbols)
                  + " frame symbols");
    } else {
        check("frame-tiling", false, "frame length is not a whole number of symbols");
    }

    PlannerInput geometry = input;
    bool geometry_ok = cfg.rt_voice_frames_per_slot > 0 && cfg.be_payload_bytes > 0
        && cfg.rt_slots + cfg.be_slots > 0;
    if (geometry_ok) {
        geometry_ok =
            cfg.mgmt_slot_symbols
                == slot_symbols_for_payload(2 * cfg.data_slots_per_cycle(), geometry)
            && cfg.rt_slot_symbols
                == slot_symbols_for_payload(
                    cfg.rt_voice_frames_per_slot * cfg.voice_frame_bits, geometry)
            && cfg.be_slot_symbols
                == slot_symbols_for_payload(cfg.be_payload_bytes * 8, geometry);
    }
    check("slot-geometry", geometry_ok,
          "slot symbol counts must match their payloads plus header and overhead");

    check("mgmt-pdu-bits",
          cfg.mgmt_pdu_bits == cfg.mac_header_bits + 2 * cfg.data_slots_per_cycle(),
          "MGMT PDU must carry two bits per data slot behind the header");

    check("mgmt-padding",
          cfg.mgmt_padded_bits >= 0
              && cfg.mgmt_pdu_bits + cfg.mgmt_padded_bits == cfg.slot_data_bits(SlotKind::MGMT),
          "padding must fill the MGMT slot capacity exactly");

    check("voice-capacity",
          cfg.rt_voice_frames_per_slot
              == ceil_div(cfg.frame_length_us * cfg.rt_cycle_frames,
                          cfg.voice_frame_interval_us),
          "an RT slot must carry the voice frames generated across its cycle");

    check("be-8-byte-alignment",
          cfg.be_payload_bytes > 0 && cfg.be_payload_bytes % 8 == 0,
          "BE payload must be a positive multiple of 8 bytes");

    check("cycle-bounds",
          cfg.mgmt_cycle_frames >= 1 && cfg.mgmt_cycle_frames <= kMaxCycleFrames
              && cfg.rt_cycle_frames >= 1 && cfg.rt_cycle_frames <= kMaxCycleFrames
              && cfg.be_cycle_frames >= 1 && cfg.be_cycle_frames <= kMaxCycleFrames,
          "cycles span 1 to 8 frames");

    check("slot-index-bounds",
          cfg.slots_per_frame() <= kMaxIndexableSlots
              && cfg.mgmt_slots * cfg.mgmt_cycle_frames <= kMaxIndexableSlots
              && cfg.rt_slots * cfg.rt_cycle_frames <= kMaxIndexableSlots
              && cfg.be_slots * cfg.be_cycle_frames <= kMaxIndexableSlots,
          "9-bit slot ids index at most 512 slots per frame and per cycle");

    return report;
}

std::vector<SlotScheduleEntry> slot_schedule(const TdmaConfig& cfg)
{
    std::vector<SlotScheduleEntry> out;
    out.reserve(static_cast<std::size_t>(cfg.slots_per_frame()));
    std::int64_t t = 0;
    int id = 0;
    for (SlotKind kind : {SlotKind::MGMT, SlotKind::RT, SlotKind::BE}) {
        const std::int64_t dur = cfg.slot_duration_us(kind);
        for (int i = 0; i < cfg.slots_in_frame(kind); ++i) {
            out.push_back({kind, id++, t, dur});
            t += dur;
        }
    }
    return out;
}

TdmaConfig table1_solution(int n)
{
    TdmaConfig cfg;
    switch (n) {
    case 1:
        cfg.frame_length_us = 80000;
        cfg.mgmt_slots = 90;
        cfg.rt_slots = 16;
        cfg.be_slots = 44;
        cfg.rt_slot_symbols = 24;
        cfg.be_slot_symbols = 64;
        cfg.mgmt_pdu_bits = 296;
        cfg.mgmt_padded_bits = 16;
        cfg.rt_voice_frames_per_slot = 4;
        cfg.be_payload_bytes = 160;
        break;
    case 2:
        cfg.frame_length_us = 80000;
        cfg.mgmt_slots = 90;
        cfg.rt_slots = 24;
        cfg.be_slots = 41;
        cfg.rt_slot_symbols = 24;
        cfg.be_slot_symbols = 64;
        cfg.mgmt_pdu_bits = 306;
        cfg.mgmt_padded_bits = 6;
        cfg.rt_voice_frames_per_slot = 4;
        cfg.be_payload_bytes = 160;
        break;
    case 3:
        cfg.frame_length_us = 128000;
        cfg.mgmt_slots = 148;
        cfg.rt_slots = 36;
        cfg.be_slots = 21;
        cfg.rt_slot_symbols = 28;
        cfg.be_slot_symbols = 192;
        cfg.mgmt_pdu_bits = 290;
        cfg.mgmt_padded_bits = 22;
        cfg.rt_voice_frames_per_slot = 6;
        cfg.be_payload_bytes = 576;
        break;
    default:
        throw ConfigError("reference solutions are numbered 1 to 3, got "
                          + std::to_string(n));
    }
    cfg.mgmt_slot_symbols = 20;
    return cfg;
}

PlannerInput reference_planner_input()
{
    return PlannerInput{};
}

} // namespace wbwf
