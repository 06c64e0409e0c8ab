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

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wbwf/errors.hpp"
#include "wbwf/planner.hpp"

namespace wbwf {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

/** `key = value` lines, '#' to end of line is comment, blank lines ignored. */
std::map<std::string, std::string> parse_key_values(std::istream& in)
{
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno)
                              + ": expected `key = value`, got \"" + line + "\"");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(lineno)
                              + ": empty key or value");
        }
        if (!out.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key \""
                              + key + "\"");
        }
    }
    return out;
}

std::int64_t to_int64(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key \"" + key + "\": not an integer: \"" + value + "\"");
    }
}

class KeyValues {
public:
    explicit KeyValues(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    std::int64_t require(const std::string& key)
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            throw ConfigError("missing required key \"" + key + "\"");
        }
        seen_.insert(key);
        return to_int64(key, it->second);
    }

    std::int64_t get(const std::string& key, std::int64_t fallback)
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            return fallback;
        }
        seen_.insert(key);
        return to_int64(key, it->second);
    }

    std::vector<std::int64_t> get_list(const std::string& key,
                                       std::vector<std::int64_t> fallback)
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            return fallback;
        }
        seen_.insert(key);
        std::vector<std::int64_t> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                throw ConfigError("key \"" + key + "\": empty list element");
            }
            out.push_back(to_int64(key, item));
        }
        if (out.empty()) {
            throw ConfigError("key \"" + key + "\": empty list");
        }
        return out;
    }

    void reject_unknown() const
    {
        for (const auto& [key, value] : kv_) {
            if (!seen_.count(key)) {
                throw ConfigError("unknown key \"" + key + "\"");
            }
        }
    }

private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> seen_;
};

int to_int(std::int64_t v, const std::string& key)
{
    if (v < INT32_MIN || v > INT32_MAX) {
        throw ConfigError("key \"" + key + "\": value out of range");
    }
    return static_cast<int>(v);
}

} // namespace

void write_tdma_config(std::ostream& out, const TdmaConfig& cfg)
{
    out << "# wbwf tdma frame configuration\n"
        << "schema = 1\n"
        << "frame_length_us = " << cfg.frame_length_us << "\n"
        << "mgmt_slots = " << cfg.mgmt_slots << "\n"
        << "rt_slots = " << cfg.rt_slots << "\n"
        << "be_slots = " << cfg.be_slots << "\n"
        << "mgmt_slot_symbols = " << cfg.mgmt_slot_symbols << "\n"
        << "rt_slot_symbols = " << cfg.rt_slot_symbols << "\n"
        << "be_slot_symbols = " << cfg.be_slot_symbols << "\n"
        << "mgmt_pdu_bits = " << cfg.mgmt_pdu_bits << "\n"
        << "mgmt_padded_bits = " << cfg.mgmt_padded_bits << "\n"
        << "rt_voice_frames_per_slot = " << cfg.rt_voice_frames_per_slot << "\n"
        << "be_payload_bytes = " << cfg.be_payload_bytes << "\n"
        << "mgmt_cycle_frames = " << cfg.mgmt_cycle_frames << "\n"
        << "rt_cycle_frames = " << cfg.rt_cycle_frames << "\n"
        << "be_cycle_frames = " << cfg.be_cycle_frames << "\n"
        << "ofdm_symbol_duration_us = " << cfg.ofdm_symbol_duration_us << "\n"
        << "bits_per_symbol = " << cfg.bits_per_symbol << "\n"
        << "slot_overhead_symbols = " << cfg.slot_overhead_symbols << "\n"
        << "mac_header_bits = " << cfg.mac_header_bits << "\n"
        << "voice_frame_bits = " << cfg.voice_frame_bits << "\n"
        << "voice_frame_interval_us = " << cfg.voice_frame_interval_us << "\n";
}

std::string tdma_config_text(const TdmaConfig& cfg)
{
    std::ostringstream out;
    write_tdma_config(out, cfg);
    return out.str();
}

TdmaConfig parse_tdma_config(std::istream& in)
{
    KeyValues kv(parse_key_values(in));
    if (kv.require("schema") != 1) {
        throw ConfigError("unsupported config schema (expected 1)");
    }
    TdmaConfig cfg;
    cfg.frame_length_us = kv.require("frame_length_us");
    cfg.mgmt_slots = to_int(kv.require("mgmt_slots"), "mgmt_slots");
    cfg.rt_slots = to_int(kv.require("rt_slots"), "rt_slots");
    cfg.be_slots = to_int(kv.require("be_slots"), "be_slots");
    cfg.mgmt_slot_symbols = to_int(kv.require("mgmt_slot_symbols"), "mgmt_slot_symbols");
    cfg.rt_slot_symbols = to_int(kv.require("rt_slot_symbols"), "rt_slot_symbols");
    cfg.be_slot_symbols = to_int(kv.require("be_slot_symbols"), "be_slot_symbols");
    cfg.mgmt_pdu_bits = to_int(kv.require("mgmt_pdu_bits"), "mgmt_pdu_bits");
    cfg.mgmt_padded_bits = to_int(kv.require("mgmt_padded_bits"), "mgmt_padded_bits");
    cfg.rt_voice_frames_per_slot =
        to_int(kv.require("rt_voice_frames_per_slot"), "rt_voice_frames_per_slot");
    cfg.be_payload_bytes = to_int(kv.require("be_payload_bytes"), "be_payload_bytes");
    cfg.mgmt_cycle_frames =
        to_int(kv.get("mgmt_cycle_frames", cfg.mgmt_cycle_frames), "mgmt_cycle_frames");
    cfg.rt_cycle_frames =
        to_int(kv.get("rt_cycle_frames", cfg.rt_cycle_frames), "rt_cycle_frames");
    cfg.be_cycle_frames =
        to_int(kv.get("be_cycle_frames", cfg.be_cycle_frames), "be_cycle_frames");
    cfg.ofdm_symbol_duration_us = to_int(
        kv.get("ofdm_symbol_duration_us", cfg.ofdm_symbol_duration_us),
        "ofdm_symbol_duration_us");
    cfg.bits_per_symbol =
        to_int(kv.get("bits_per_symbol", cfg.bits_per_symbol), "bits_per_symbol");
    cfg.slot_overhead_symbols = to_int(
        kv.get("slot_overhead_symbols", cfg.slot_overhead_symbols),
        "slot_overhead_symbols");
    cfg.mac_header_bits =
        to_int(kv.get("mac_header_bits", cfg.mac_header_bits), "mac_header_bits");
    cfg.voice_frame_bits =
        to_int(kv.get("voice_frame_bits", cfg.voice_frame_bits), "voice_frame_bits");
    cfg.voice_frame_interval_us =
        kv.get("voice_frame_interval_us", cfg.voice_frame_interval_us);
    kv.reject_unknown();

    PlannerInput input;
    input.ofdm_symbol_duration_us = cfg.ofdm_symbol_duration_us;
    input.bits_per_symbol = cfg.bits_per_symbol;
    input.slot_overhead_symbols = cfg.slot_overhead_symbols;
    input.mac_header_bits = cfg.mac_header_bits;
    input.voice_frame_bits = cfg.voice_frame_bits;
    input.voice_frame_interval_us = cfg.voice_frame_interval_us;
    if (cfg.ofdm_symbol_duration_us > 0) {
        input.phy_bit_rate = static_cast<std::int64_t>(cfg.bits_per_symbol) * 1000000
            / cfg.ofdm_symbol_duration_us;
    }
    const ValidationReport report = validate_config(cfg, input);
    if (!report.ok()) {
        throw ConfigError("config fails validation:\n" + report.summary());
    }
    return cfg;
}

TdmaConfig load_tdma_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    try {
        return parse_tdma_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

PlannerInput parse_planner_input(std::istream& in)
{
    KeyValues kv(parse_key_values(in));
    if (kv.require("schema") != 1) {
        throw ConfigError("unsupported planner input schema (expected 1)");
    }
    PlannerInput input;
    input.phy_bit_rate = kv.get("phy_bit_rate", input.phy_bit_rate);
    input.mac_header_bits =
        to_int(kv.get("mac_header_bits", input.mac_header_bits), "mac_header_bits");
    input.ofdm_symbol_duration_us = to_int(
        kv.get("ofdm_symbol_duration_us", input.ofdm_symbol_duration_us),
        "ofdm_symbol_duration_us");
    input.bits_per_symbol =
        to_int(kv.get("bits_per_symbol", input.bits_per_symbol), "bits_per_symbol");
    input.slot_overhead_symbols = to_int(
        kv.get("slot_overhead_symbols", input.slot_overhead_symbols),
        "slot_overhead_symbols");
    input.voice_frame_bits =
        to_int(kv.get("voice_frame_bits", input.voice_frame_bits), "voice_frame_bits");
    input.voice_frame_interval_us =
        kv.get("voice_frame_interval_us", input.voice_frame_interval_us);
    input.candidate_frame_lengths_us =
        kv.get_list("candidate_frame_lengths_us", input.candidate_frame_lengths_us);
    input.max_nodes_target =
        to_int(kv.get("max_nodes_target", input.max_nodes_target), "max_nodes_target");
    kv.reject_unknown();

    if (input.phy_bit_rate <= 0 || input.mac_header_bits <= 0
        || input.ofdm_symbol_duration_us <= 0 || input.bits_per_symbol <= 0
        || input.slot_overhead_symbols < 0 || input.voice_frame_bits <= 0
        || input.voice_frame_interval_us <= 0 || input.max_nodes_target < 1) {
        throw ConfigError("planner input values must be positive");
    }
    for (std::int64_t f : input.candidate_frame_lengths_us) {
        if (f <= 0) {
            throw ConfigError("candidate frame lengths must be positive");
        }
    }
    return input;
}

PlannerInput load_planner_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open planner input file: " + path);
    }
    try {
        return parse_planner_input(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace wbwf
