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

#include "wbwf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wbwf/errors.hpp"

namespace wbwf {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

[[noreturn]] void fail(int lineno, const std::string& what)
{
    throw ScenarioInvalid("line " + std::to_string(lineno) + ": " + what);
}

std::int64_t parse_i64(const std::string& text, int lineno, const std::string& what)
{
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("");
        }
        return v;
    } catch (const std::exception&) {
        fail(lineno, what + " is not an integer: \"" + text + "\"");
    }
}

double parse_f64(const std::string& text, int lineno, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("");
        }
        return v;
    } catch (const std::exception&) {
        fail(lineno, what + " is not a number: \"" + text + "\"");
    }
}

std::string join_path(const std::string& base_dir, const std::string& path)
{
    if (path.empty() || path.front() == '/') {
        return path;
    }
    if (base_dir.empty() || base_dir == ".") {
        return path;
    }
    if (base_dir.back() == '/') {
        return base_dir + path;
    }
    return base_dir + "/" + path;
}

} // namespace

std::uint64_t node_address(int index)
{
    return 0x020000000000ull | static_cast<std::uint64_t>(index & 0xFF);
}

Scenario parse_scenario(std::istream& in, const std::string& base_dir)
{
    Scenario sc;
    sc.channel.ber_table = default_ber_table();

    bool saw_solution = false;
    bool saw_config = false;
    bool saw_duration = false;
    std::string config_path;
    std::string section;
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
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(lineno, "unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "tdma" && section != "channel" && section != "nodes"
                && section != "ptt") {
                fail(lineno, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(lineno, "expected `key = value`");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(lineno, "empty key or value");
        }

        if (section.empty()) {
            if (key == "schema") {
                sc.schema = static_cast<int>(parse_i64(value, lineno, "schema"));
                if (sc.schema != 1) {
                    fail(lineno, "unsupported scenario schema (expected 1)");
                }
            } else if (key == "duration_ms") {
                sc.duration_us = parse_i64(value, lineno, "duration_ms") * 1000;
                saw_duration = true;
            } else if (key == "seed") {
                sc.seed = static_cast<std::uint64_t>(
                    parse_i64(value, lineno, "seed"));
            } else {
                fail(lineno, "unknown top-level key \"" + key + "\"");
            }
        } else if (section == "tdma") {
            if (key == "solution") {
                sc.tdma = table1_solution(
                    static_cast<int>(parse_i64(value, lineno, "solution")));
                saw_solution = true;
            } else if (key == "config") {
                config_path = join_path(base_dir, value);
                saw_config = true;
            } else {
                fail(lineno, "unknown [tdma] key \"" + key + "\"");
            }
        } else if (section == "channel") {
            if (key == "ber_table") {
                if (value == "default") {
                    sc.channel.ber_table = default_ber_table();
                } else if (value == "ideal") {
                    sc.channel.ber_table = ideal_ber_table();
                } else {
                    sc.channel.ber_table = load_ber_table(join_path(base_dir, value));
                }
            } else if (key == "tx_power_dbm") {
                sc.channel.tx_power_dbm = parse_f64(value, lineno, key);
            } else if (key == "carrier_freq_mhz") {
                sc.channel.carrier_freq_mhz = parse_f64(value, lineno, key);
            } else if (key == "bandwidth_mhz") {
                sc.channel.bandwidth_mhz = parse_f64(value, lineno, key);
            } else if (key == "noise_figure_db") {
                sc.channel.noise_figure_db = parse_f64(value, lineno, key);
            } else if (key == "base_height_delta_m") {
                sc.channel.base_height_delta_m = parse_f64(value, lineno, key);
            } else {
                fail(lineno, "unknown [channel] key \"" + key + "\"");
            }
        } else if (section == "nodes") {
            const std::vector<std::string> parts = split_ws(value);
            if (key == "node") {
                if (parts.size() != 4) {
                    fail(lineno, "node takes `index x_m y_m mgmt_slot`");
                }
                NodeSpec n;
                n.index = static_cast<int>(parse_i64(parts[0], lineno, "node index"));
                n.x_m = parse_f64(parts[1], lineno, "node x");
                n.y_m = parse_f64(parts[2], lineno, "node y");
                n.mgmt_slot =
                    static_cast<int>(parse_i64(parts[3], lineno, "node mgmt_slot"));
                sc.nodes.push_back(n);
            } else if (key == "sleep") {
                if (parts.size() != 3) {
                    fail(lineno, "sleep takes `node start_ms end_ms`");
                }
                SleepSpec s;
                s.node = static_cast<int>(parse_i64(parts[0], lineno, "sleep node"));
                s.start_us = parse_i64(parts[1], lineno, "sleep start_ms") * 1000;
                s.end_us = parse_i64(parts[2], lineno, "sleep end_ms") * 1000;
                sc.sleeps.push_back(s);
            } else {
                fail(lineno, "unknown [nodes] key \"" + key + "\"");
            }
        } else if (section == "ptt") {
            if (key == "press") {
                const std::vector<std::string> parts = split_ws(value);
                if (parts.size() != 4) {
                    fail(lineno, "press takes `node press_ms talk_ms dest`");
                }
                PressSpec p;
                p.node = static_cast<int>(parse_i64(parts[0], lineno, "press node"));
                p.press_us = parse_i64(parts[1], lineno, "press_ms") * 1000;
                p.talk_us = parse_i64(parts[2], lineno, "talk_ms") * 1000;
                if (parts[3] == "broadcast") {
                    p.dest_node = -1;
                } else {
                    p.dest_node =
                        static_cast<int>(parse_i64(parts[3], lineno, "press dest"));
                }
                sc.presses.push_back(p);
            } else {
                fail(lineno, "unknown [ptt] key \"" + key + "\"");
            }
        }
    }

    if (!saw_duration) {
        throw ScenarioInvalid("scenario must set duration_ms");
    }
    if (saw_solution && saw_config) {
        throw ScenarioInvalid("[tdma] takes either solution or config, not both");
    }
    if (saw_config) {
        sc.tdma = load_tdma_config(config_path);
    }
    if (!saw_solution && !saw_config) {
        sc.tdma = table1_solution(1);
    }
    validate_scenario(sc);
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioInvalid("cannot open scenario: " + path);
    }
    std::string base_dir = ".";
    if (const auto slash = path.find_last_of('/'); slash != std::string::npos) {
        base_dir = path.substr(0, slash);
    }
    try {
        return parse_scenario(in, base_dir);
    } catch (const ScenarioInvalid& e) {
        throw ScenarioInvalid(path + ": " + e.what());
    }
}

void validate_scenario(const Scenario& scenario)
{
    if (scenario.duration_us <= 0) {
        throw ScenarioInvalid("duration must be positive");
    }
    if (scenario.nodes.empty()) {
        throw ScenarioInvalid("scenario needs at least one node");
    }

    const ValidationReport plan =
        [&] {
            PlannerInput input;
            input.ofdm_symbol_duration_us = scenario.tdma.ofdm_symbol_duration_us;
            input.bits_per_symbol = scenario.tdma.bits_per_symbol;
            input.slot_overhead_symbols = scenario.tdma.slot_overhead_symbols;
            input.mac_header_bits = scenario.tdma.mac_header_bits;
            input.voice_frame_bits = scenario.tdma.voice_frame_bits;
            input.voice_frame_interval_us = scenario.tdma.voice_frame_interval_us;
            if (scenario.tdma.ofdm_symbol_duration_us > 0) {
                input.phy_bit_rate =
                    static_cast<std::int64_t>(scenario.tdma.bits_per_symbol) * 1000000
                    / scenario.tdma.ofdm_symbol_duration_us;
            }
            return validate_config(scenario.tdma, input);
        }();
    if (!plan.ok()) {
        throw ScenarioInvalid("frame plan fails validation:\n" + plan.summary());
    }
    if (scenario.channel.ber_table.empty()) {
        throw ScenarioInvalid("channel needs a BER table");
    }

    std::set<int> indices;
    std::set<int> mgmt_slots;
    for (const NodeSpec& n : scenario.nodes) {
        if (n.index < 0 || n.index > 0xFF) {
            throw ScenarioInvalid("node index " + std::to_string(n.index)
                                  + " outside 0..255");
        }
        if (!indices.insert(n.index).second) {
            throw ScenarioInvalid("duplicate node index " + std::to_string(n.index));
        }
        if (n.mgmt_slot < 0 || n.mgmt_slot >= scenario.tdma.mgmt_slots) {
            throw ScenarioInvalid("node " + std::to_string(n.index)
                                  + ": mgmt_slot outside the MGMT region");
        }
        if (!mgmt_slots.insert(n.mgmt_slot).second) {
            throw ScenarioInvalid("duplicate mgmt_slot "
                                  + std::to_string(n.mgmt_slot));
        }
        if (!std::isfinite(n.x_m) || !std::isfinite(n.y_m)) {
            throw ScenarioInvalid("node " + std::to_string(n.index)
                                  + ": position must be finite");
        }
    }

    // Reception is resolved at slot end with no modelled propagation delay;
    // that abstraction only holds while flight time stays well inside one
    // slot. One overhead symbol (128 us) of flight is the cutoff: 38.4 km.
    const double guard_m =
        static_cast<double>(scenario.tdma.slot_overhead_symbols
                            * scenario.tdma.ofdm_symbol_duration_us)
        * 299.792458;
    for (std::size_t i = 0; i < scenario.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < scenario.nodes.size(); ++j) {
            const double dx = scenario.nodes[i].x_m - scenario.nodes[j].x_m;
            const double dy = scenario.nodes[i].y_m - scenario.nodes[j].y_m;
            const double d = std::hypot(dx, dy);
            if (d <= 0.0) {
                throw ScenarioInvalid(
                    "nodes " + std::to_string(scenario.nodes[i].index) + " and "
                    + std::to_string(scenario.nodes[j].index)
                    + " share one position; the link budget needs d > 0");
            }
            if (d >= guard_m) {
                throw ScenarioInvalid(
                    "nodes " + std::to_string(scenario.nodes[i].index) + " and "
                    + std::to_string(scenario.nodes[j].index)
                    + " are too far apart for the zero-delay propagation model");
            }
        }
    }

    for (const PressSpec& p : scenario.presses) {
        if (!indices.count(p.node)) {
            throw ScenarioInvalid("press references unknown node "
                                  + std::to_string(p.node));
        }
        if (p.dest_node != -1 && !indices.count(p.dest_node)) {
            throw ScenarioInvalid("press references unknown destination "
                                  + std::to_string(p.dest_node));
        }
        if (p.dest_node == p.node) {
            throw ScenarioInvalid("node " + std::to_string(p.node)
                                  + " cannot call itself");
        }
        if (p.press_us < 0 || p.talk_us <= 0) {
            throw ScenarioInvalid("press times must be non-negative with positive talk");
        }
    }
    for (const SleepSpec& s : scenario.sleeps) {
        if (!indices.count(s.node)) {
            throw ScenarioInvalid("sleep references unknown node "
                                  + std::to_string(s.node));
        }
        if (s.start_us < 0 || s.end_us <= s.start_us) {
            throw ScenarioInvalid("sleep window must be non-empty and non-negative");
        }
    }
}

} // namespace wbwf
