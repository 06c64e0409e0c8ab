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

#include "wbwf/channel.hpp"
#include "wbwf/planner.hpp"

namespace wbwf {

struct NodeSpec {
    int index = 0;
    double x_m = 0;
    double y_m = 0;
    int mgmt_slot = 0;
};

struct PressSpec {
    int node = 0;
    std::int64_t press_us = 0;
    std::int64_t talk_us = 0;
    int dest_node = -1; // -1 is broadcast
};

struct SleepSpec {
    int node = 0;
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
};

/**
 * One runnable experiment: the frame plan, channel, node placement with
 * fixed MGMT slot assignment, and the scripted PTT actions.
 */
struct Scenario {
    int schema = 1;
    std::int64_t duration_us = 0;
    std::uint64_t seed = 1;
    TdmaConfig tdma;
    ChannelParams channel;
    std::vector<NodeSpec> nodes;
    std::vector<PressSpec> presses;
    std::vector<SleepSpec> sleeps;
};

/** MAC address of a scenario node: locally administered 02:00:00:00:00:xx. */
std::uint64_t node_address(int index);

/**
 * Parses the sectioned `key = value` scenario grammar (see docs/formats.md).
 * base_dir anchors relative paths (BER table, frame plan documents).
 * Throws ScenarioInvalid with field-level diagnostics; the returned scenario
 * has passed validate_scenario.
 */
Scenario parse_scenario(std::istream& in, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/**
 * Structural checks: unique node indices and MGMT slots within capacity,
 * finite positions, pairwise distances inside the slot guard time, sane
 * press/sleep scripts, positive duration.
 */
void validate_scenario(const Scenario& scenario);

} // namespace wbwf
