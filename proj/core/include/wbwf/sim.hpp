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
#include <functional>
#include <queue>
#include <vector>

#include "wbwf/metrics.hpp"
#include "wbwf/scenario.hpp"
#include "wbwf/trace.hpp"

namespace wbwf {

/**
 * Priority band within one timestamp. Deliveries from the ending slot run
 * before user actions, which run before the next slot boundary, so a press
 * scheduled exactly on a boundary still catches that slot.
 */
enum class EventBand : int { Delivery = 0, User = 1, SlotBoundary = 2 };

/**
 * Deterministic discrete-event queue. Events execute in non-decreasing
 * time; ties break by band, then by insertion order.
 */
class EventQueue {
public:
    void schedule(std::int64_t t_us, EventBand band, std::function<void()> fn);

    /** Runs the next event; false when the queue is empty. */
    bool run_next();

    std::int64_t now() const { return now_; }
    bool empty() const { return heap_.empty(); }

private:
    struct Entry {
        std::int64_t t_us;
        int band;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.t_us != b.t_us) return a.t_us > b.t_us;
            if (a.band != b.band) return a.band > b.band;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::uint64_t seq_ = 0;
    std::int64_t now_ = 0;
};

struct RunResult {
    MetricsReport metrics;
    std::vector<std::string> trace_lines;
};

/**
 * Executes a validated scenario to its duration: drives every MAC node
 * through the slot timetable, resolves each slot on the shared medium by
 * receive power with co-slot interference, and collects the trace and the
 * metrics report.
 *
 * Identical (scenario, seed) pairs produce byte-identical outputs. The
 * medium enforces slot discipline: a transmission outside the sender's
 * fixed MGMT slot or claimed data slots throws ProtocolViolation.
 */
RunResult run(const Scenario& scenario, bool with_trace = true);

} // namespace wbwf
