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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wbwf {

enum class SlotKind { MGMT, RT, BE };

const char* to_string(SlotKind kind);

/**
 * Physical and service constants the frame planner works from.
 *
 * Defaults describe the reference waveform: 1.625 Mbps coded rate, 176-bit
 * MAC header, 16 us OFDM symbols carrying 26 information bits, 8 symbols of
 * per-slot overhead (preamble plus guard), and a 2400 bps vocoder emitting
 * one 54-bit frame every 22.5 ms.
 */
struct PlannerInput {
    std::int64_t phy_bit_rate = 1625000;  // information bits per second
    int mac_header_bits = 176;
    int ofdm_symbol_duration_us = 16;
    int bits_per_symbol = 26;
    int slot_overhead_symbols = 8;
    int voice_frame_bits = 54;
    std::int64_t voice_frame_interval_us = 22500;
    std::vector<std::int64_t> candidate_frame_lengths_us = {80000, 128000};
    int max_nodes_target = 90;

    bool operator==(const PlannerInput&) const = default;
};

/**
 * A complete TDMA timing plan: slot counts and geometries for one atomic
 * frame, cycle structure, and the physical constants it was derived from.
 * One atomic frame is MGMT slots, then RT slots, then BE slots, gap-free.
 */
struct TdmaConfig {
    std::int64_t frame_length_us = 0;
    int mgmt_slots = 0;
    int rt_slots = 0;
    int be_slots = 0;
    int mgmt_slot_symbols = 0;
    int rt_slot_symbols = 0;
    int be_slot_symbols = 0;
    int mgmt_pdu_bits = 0;    // header + 2 bits per data slot in the data cycles
    int mgmt_padded_bits = 0; // fill between the MGMT PDU and the slot capacity
    int rt_voice_frames_per_slot = 0;
    int be_payload_bytes = 0;
    int mgmt_cycle_frames = 1;
    int rt_cycle_frames = 1;
    int be_cycle_frames = 1;

    // Carried so a config document fully describes the plan on its own.
    int ofdm_symbol_duration_us = 16;
    int bits_per_symbol = 26;
    int slot_overhead_symbols = 8;
    int mac_header_bits = 176;
    int voice_frame_bits = 54;
    std::int64_t voice_frame_interval_us = 22500;

    bool operator==(const TdmaConfig&) const = default;

    int slot_symbols(SlotKind kind) const;
    std::int64_t slot_duration_us(SlotKind kind) const;
    /** Payload capacity of one slot: (symbols - overhead) * bits_per_symbol. */
    int slot_data_bits(SlotKind kind) const;
    int cycle_frames(SlotKind kind) const;
    int slots_per_frame() const { return mgmt_slots + rt_slots + be_slots; }
    /** Data-slot bitmap length: RT cycle slots plus BE cycle slots. */
    int data_slots_per_cycle() const
    {
        return rt_slots * rt_cycle_frames + be_slots * be_cycle_frames;
    }
    std::int64_t mgmt_cycle_us() const { return frame_length_us * mgmt_cycle_frames; }
    /** First slot_id_in_frame of the kind's region within the atomic frame. */
    int region_base(SlotKind kind) const;
    int slots_in_frame(SlotKind kind) const;
};

struct SlotScheduleEntry {
    SlotKind kind;
    int slot_id_in_frame;
    std::int64_t start_us;
    std::int64_t duration_us;

    bool operator==(const SlotScheduleEntry&) const = default;
};

struct CheckResult {
    std::string rule;
    bool pass;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool ok() const;
    std::string summary() const;
};

/**
 * Symbols needed for one slot that carries `payload_bits` behind the MAC
 * header: ceil((header + payload) / bits_per_symbol) + slot overhead.
 */
int slot_symbols_for_payload(int payload_bits, const PlannerInput& input);

/**
 * Enumerates every frame configuration that satisfies the four design rules
 * over the candidate frame lengths, sorted by frame length then MGMT slot
 * count (then RT slots, BE slots, BE payload).
 *
 * Search space per frame length: BE payload sizes are the multiples of
 * 8 bytes up to 576 (the IPv4 minimum reassembly MTU) whose PDU fills its
 * slot with zero padding; RT and BE slot counts are enumerated exhaustively
 * within the remaining time; the MGMT slot count follows from exact
 * divisibility and is kept when it is even (node counts are planned in
 * pairs) and at least max_nodes_target. Cycle lengths are planned at one
 * frame per cycle.
 */
std::vector<TdmaConfig> plan_configurations(const PlannerInput& input);

/** Checks every structural invariant of cfg; one named result per rule. */
ValidationReport validate_config(const TdmaConfig& cfg, const PlannerInput& input);

/**
 * The gap-free slot timetable of one atomic frame: MGMT region, RT region,
 * BE region; slot_id_in_frame is dense from 0.
 */
std::vector<SlotScheduleEntry> slot_schedule(const TdmaConfig& cfg);

/** Built-in reference solutions 1..3 (80 ms, 80 ms, 128 ms). */
TdmaConfig table1_solution(int n);

/** PlannerInput whose defaults the reference solutions derive from. */
PlannerInput reference_planner_input();

// --- plain-text serialization (one `key = value` per line, '#' comments) ---

void write_tdma_config(std::ostream& out, const TdmaConfig& cfg);
std::string tdma_config_text(const TdmaConfig& cfg);
/** Parses and validates; throws ConfigError on syntax or invariant failure. */
TdmaConfig parse_tdma_config(std::istream& in);
TdmaConfig load_tdma_config(const std::string& path);

PlannerInput parse_planner_input(std::istream& in);
PlannerInput load_planner_input(const std::string& path);

} // namespace wbwf
