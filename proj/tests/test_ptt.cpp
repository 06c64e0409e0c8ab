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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "wbwf/errors.hpp"
#include "wbwf/mac.hpp"
#include "wbwf/ptt.hpp"
#include "wbwf/rng.hpp"
#include "wbwf/scenario.hpp"
#include "wbwf/trace.hpp"

using namespace wbwf;

namespace {

/**
 * One PttUser over one MacNode with a hand-run timer queue. Timers due at a
 * slot start run before the boundary, matching the event loop's band order;
 * equal timestamps run in insertion order.
 */
struct Rig {
    TdmaConfig cfg;
    std::vector<SlotScheduleEntry> schedule;
    std::multimap<std::int64_t, std::function<void()>> timers;
    std::unique_ptr<MacNode> mac;
    std::unique_ptr<PttUser> user;

    std::vector<std::pair<std::int64_t, std::int64_t>> established; // press_us, t_us
    std::vector<std::string> failed;
    std::vector<std::int64_t> frame_times;
    std::vector<TraceEvent> events;
    std::uint64_t frame = 0;

    explicit Rig(const TdmaConfig& config) : cfg(config), schedule(slot_schedule(config))
    {
        MacNode::Params params;
        params.node_index = 0;
        params.address = node_address(0);
        params.mgmt_slot = 0;
        MacCallbacks mcb;
        mcb.trace = [this](const TraceEvent& e) { events.push_back(e); };
        mcb.session_established = [this](std::uint16_t sid, std::int64_t t) {
            user->handle_established(sid, t);
        };
        mcb.session_failed = [this](std::uint16_t sid, std::int64_t t,
                                    const std::string& reason) {
            user->handle_failed(sid, t, reason);
        };
        mcb.session_closed = [this](std::uint16_t sid, std::int64_t t) {
            user->handle_closed(sid, t);
        };
        mac = std::make_unique<MacNode>(params, cfg, substream(1, RngStream::MacTsa, 0),
                                        std::move(mcb));
        PttUser::Callbacks ucb;
        ucb.trace = [this](const TraceEvent& e) { events.push_back(e); };
        ucb.frame_generated = [this](std::uint16_t, std::int64_t t) {
            frame_times.push_back(t);
        };
        ucb.established = [this](std::uint16_t, std::int64_t press, std::int64_t t) {
            established.push_back({press, t});
        };
        ucb.failed = [this](std::uint16_t, const std::string& reason) {
            failed.push_back(reason);
        };
        user = std::make_unique<PttUser>(
            0, *mac,
            [this](std::int64_t when, std::function<void()> fn) {
                timers.insert({when, std::move(fn)});
            },
            std::move(ucb));
    }

    void flush_timers(std::int64_t up_to_us)
    {
        while (!timers.empty() && timers.begin()->first <= up_to_us) {
            auto fn = std::move(timers.begin()->second);
            timers.erase(timers.begin());
            fn();
        }
    }

    void run_frames(int count)
    {
        for (int f = 0; f < count; ++f, ++frame) {
            for (const SlotScheduleEntry& entry : schedule) {
                SlotRef ref;
                ref.kind = entry.kind;
                ref.slot_id_in_frame = entry.slot_id_in_frame;
                const int base = cfg.region_base(entry.kind);
                const int frame_index = static_cast<int>(
                    frame % static_cast<std::uint64_t>(cfg.cycle_frames(entry.kind)));
                ref.frame_index = frame_index;
                ref.slot_id_in_cycle = frame_index * cfg.slots_in_frame(entry.kind)
                    + (entry.slot_id_in_frame - base);
                ref.frame_number = frame;
                ref.start_us = static_cast<std::int64_t>(frame) * cfg.frame_length_us
                    + entry.start_us;
                ref.end_us = ref.start_us + entry.duration_us;
                flush_timers(ref.start_us);
                (void)mac->on_slot_boundary(ref, ref.start_us);
            }
        }
        flush_timers(static_cast<std::int64_t>(frame) * cfg.frame_length_us);
    }
};

int count_events(const Rig& rig, const char* kind)
{
    int n = 0;
    for (const TraceEvent& e : rig.events) {
        n += e.kind == kind;
    }
    return n;
}

} // namespace

TEST_CASE("a broadcast talk spurt produces one frame per vocoder interval")
{
    Rig rig(table1_solution(1));
    rig.user->press(kBroadcastAddress, 1000000, 0);
    CHECK(rig.user->phase() == PttPhase::PRESSED_WAITING);
    rig.run_frames(20);

    REQUIRE(rig.established.size() == 1);
    CHECK(rig.established[0].first == 0);
    CHECK(rig.established[0].second > 0);
    // 1 s of speech at 22.5 ms per coded frame: frames at 0, 22.5, ..,
    // 990 ms after establishment.
    CHECK(rig.frame_times.size() == 45);
    CHECK(rig.frame_times.front() == rig.established[0].second);
    for (std::size_t i = 0; i < rig.frame_times.size(); ++i) {
        CHECK(rig.frame_times[i]
              == rig.established[0].second + static_cast<std::int64_t>(i) * 22500);
    }
    // Released, drained, closed: the user is back to silence.
    CHECK(rig.user->phase() == PttPhase::SILENT);
    CHECK(rig.user->active_session() == 0);
    CHECK(count_events(rig, "ptt_talking") == 1);
    CHECK(count_events(rig, "ptt_release") == 1);
}

TEST_CASE("two seconds of speech generate 89 frames")
{
    Rig rig(table1_solution(3));
    rig.user->press(kBroadcastAddress, 2000000, 0);
    rig.run_frames(20);
    REQUIRE(rig.established.size() == 1);
    CHECK(rig.frame_times.size() == 89);
    CHECK(rig.user->phase() == PttPhase::SILENT);
}

TEST_CASE("the release wins a timestamp shared with a frame tick")
{
    // 45 ms is exactly two intervals: the tick coinciding with the release
    // must not fire, so the spurt is two frames, not three.
    Rig rig(table1_solution(1));
    rig.user->press(kBroadcastAddress, 45000, 0);
    rig.run_frames(10);
    REQUIRE(rig.established.size() == 1);
    CHECK(rig.frame_times.size() == 2);
    CHECK(rig.user->phase() == PttPhase::SILENT);
}

TEST_CASE("pressing twice without releasing is rejected")
{
    Rig rig(table1_solution(1));
    rig.user->press(kBroadcastAddress, 500000, 0);
    CHECK_THROWS_AS(rig.user->press(kBroadcastAddress, 500000, 10), AlreadyActive);
    rig.run_frames(2);
    CHECK(rig.user->phase() == PttPhase::TALKING);
    CHECK_THROWS_AS(rig.user->press(kBroadcastAddress, 500000, 200000), AlreadyActive);
}

TEST_CASE("a failed session returns the user to silence for a retry")
{
    // Unicast with no peer on the air: the handshake times out.
    Rig rig(table1_solution(1));
    rig.user->press(node_address(7), 500000, 0);
    rig.run_frames(4);
    REQUIRE(rig.failed.size() == 1);
    CHECK(rig.failed[0].find("no response") != std::string::npos);
    CHECK(rig.user->phase() == PttPhase::SILENT);
    CHECK(count_events(rig, "ptt_failed") == 1);
    CHECK(rig.frame_times.empty());

    // The user can press again after the failure.
    rig.user->press(kBroadcastAddress, 100000, rig.frame * rig.cfg.frame_length_us);
    rig.run_frames(4);
    CHECK(rig.established.size() == 1);
    CHECK(rig.user->phase() == PttPhase::SILENT);
}

TEST_CASE("a released user can talk again")
{
    Rig rig(table1_solution(1));
    rig.user->press(kBroadcastAddress, 100000, 0);
    rig.run_frames(6);
    CHECK(rig.user->phase() == PttPhase::SILENT);
    const std::size_t frames_first = rig.frame_times.size();
    CHECK(frames_first >= 5);

    rig.user->press(kBroadcastAddress, 100000, rig.frame * rig.cfg.frame_length_us);
    rig.run_frames(6);
    CHECK(rig.established.size() == 2);
    CHECK(rig.frame_times.size() == 2 * frames_first);
    CHECK(rig.user->phase() == PttPhase::SILENT);
}

TEST_CASE("press script generation is deterministic per seed")
{
    SplitMix64 rng_a(42);
    SplitMix64 rng_b(42);
    const auto a = synthetic_press_script(10, 3000000, 400000, 300000, 0.5, rng_a);
    const auto b = synthetic_press_script(10, 3000000, 400000, 300000, 0.5, rng_b);
    REQUIRE(a.size() == b.size());
    CHECK(!a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].node == b[i].node);
        CHECK(a[i].press_us == b[i].press_us);
        CHECK(a[i].talk_us == b[i].talk_us);
        CHECK(a[i].dest_node == b[i].dest_node);
    }

    SplitMix64 rng_c(43);
    const auto c = synthetic_press_script(10, 3000000, 400000, 300000, 0.5, rng_c);
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) {
        differs = a[i].press_us != c[i].press_us || a[i].node != c[i].node;
    }
    CHECK(differs);
}

TEST_CASE("press scripts are sorted and every press is usable")
{
    SplitMix64 rng(7);
    const int nodes = 8;
    const std::int64_t duration = 5000000;
    const auto script = synthetic_press_script(nodes, duration, 300000, 250000, 0.4, rng);
    REQUIRE(!script.empty());
    for (std::size_t i = 0; i < script.size(); ++i) {
        const SyntheticPress& p = script[i];
        CHECK(p.node >= 0);
        CHECK(p.node < nodes);
        CHECK(p.press_us >= 0);
        CHECK(p.press_us < duration);
        CHECK(p.talk_us >= 45000);
        CHECK(p.dest_node >= -1);
        CHECK(p.dest_node < nodes);
        CHECK(p.dest_node != p.node);
        if (i > 0) {
            const SyntheticPress& q = script[i - 1];
            CHECK((q.press_us < p.press_us
                   || (q.press_us == p.press_us && q.node <= p.node)));
        }
    }
    // A node never overlaps its own presses.
    std::map<int, std::int64_t> last_end;
    for (const SyntheticPress& p : script) {
        const auto it = last_end.find(p.node);
        if (it != last_end.end()) {
            CHECK(p.press_us > it->second);
        }
        last_end[p.node] = p.press_us + p.talk_us;
    }
}

TEST_CASE("broadcast fraction one makes every press a broadcast")
{
    SplitMix64 rng(11);
    const auto script = synthetic_press_script(6, 4000000, 300000, 250000, 1.0, rng);
    REQUIRE(!script.empty());
    for (const SyntheticPress& p : script) {
        CHECK(p.dest_node == -1);
    }
}

TEST_CASE("broadcast fraction zero makes every press unicast")
{
    SplitMix64 rng(11);
    const auto script = synthetic_press_script(6, 4000000, 300000, 250000, 0.0, rng);
    REQUIRE(!script.empty());
    for (const SyntheticPress& p : script) {
        CHECK(p.dest_node >= 0);
        CHECK(p.dest_node != p.node);
    }
}
