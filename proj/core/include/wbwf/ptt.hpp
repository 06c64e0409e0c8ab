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
#include <vector>

#include "wbwf/mac.hpp"
#include "wbwf/rng.hpp"

namespace wbwf {

enum class PttPhase { SILENT, PRESSED_WAITING, TALKING, RELEASING };

const char* to_string(PttPhase phase);

/**
 * Push-to-talk user model above one MAC node. A press opens a session and
 * waits for establishment; while talking, one 54-bit coded frame is queued
 * every 22.5 ms (first frame immediately at establishment); the scripted
 * talk duration then triggers the release primitive.
 *
 * The model owns no timers: it asks the scheduler for callbacks on the
 * simulation clock.
 */
class PttUser {
public:
    using Scheduler = std::function<void(std::int64_t when_us, std::function<void()> fn)>;

    struct Callbacks {
        std::function<void(const TraceEvent&)> trace;
        /** One generated voice frame (before it is queued at the MAC). */
        std::function<void(std::uint16_t session, std::int64_t t_us)> frame_generated;
        std::function<void(std::uint16_t session, std::int64_t press_us, std::int64_t t_us)>
            established;
        std::function<void(std::uint16_t session, const std::string& reason)> failed;
    };

    PttUser(int node, MacNode& mac, Scheduler scheduler, Callbacks callbacks);

    /**
     * Button press: issues the MAC session request and schedules the release
     * once the session has been up for talk_duration_us. Throws AlreadyActive
     * when the user is not SILENT.
     */
    void press(std::uint64_t destination, std::int64_t talk_duration_us, std::int64_t now_us);

    // MAC session callbacks, wired by the harness.
    void handle_established(std::uint16_t session, std::int64_t t_us);
    void handle_failed(std::uint16_t session, std::int64_t t_us, const std::string& reason);
    void handle_closed(std::uint16_t session, std::int64_t t_us);

    PttPhase phase() const { return phase_; }
    std::uint16_t active_session() const { return session_; }

private:
    void generate_frame(std::uint16_t session, std::uint64_t index, std::int64_t t_us);

    int node_;
    MacNode& mac_;
    Scheduler schedule_;
    Callbacks cb_;

    PttPhase phase_ = PttPhase::SILENT;
    std::uint16_t session_ = 0;
    std::int64_t press_us_ = 0;
    std::int64_t talk_duration_us_ = 0;
    std::int64_t release_at_us_ = -1;
};

/** One scripted press for synthetic load generation. */
struct SyntheticPress {
    int node;
    std::int64_t press_us;
    std::int64_t talk_us;
    int dest_node; // -1 for broadcast
};

/**
 * Synthetic convenience only: draws an exponential on/off press script for
 * `nodes` stations over [0, duration). Not part of the protocol model; the
 * reference talk behaviour is fully scripted in scenario files.
 */
std::vector<SyntheticPress> synthetic_press_script(int nodes, std::int64_t duration_us,
                                                   std::int64_t mean_silence_us,
                                                   std::int64_t mean_talk_us,
                                                   double broadcast_fraction, SplitMix64& rng);

} // namespace wbwf
