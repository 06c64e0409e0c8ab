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

#include "wbwf/ptt.hpp"

#include <algorithm>
#include <cmath>

#include "wbwf/errors.hpp"
#include "wbwf/pdu.hpp"

namespace wbwf {

const char* to_string(PttPhase phase)
{
    switch (phase) {
    case PttPhase::SILENT: return "silent";
    case PttPhase::PRESSED_WAITING: return "pressed_waiting";
    case PttPhase::TALKING: return "talking";
    case PttPhase::RELEASING: return "releasing";
    }
    return "?";
}

PttUser::PttUser(int node, MacNode& mac, Scheduler scheduler, Callbacks callbacks)
    : node_(node), mac_(mac), schedule_(std::move(scheduler)), cb_(std::move(callbacks))
{
}

void PttUser::press(std::uint64_t destination, std::int64_t talk_duration_us,
                    std::int64_t now_us)
{
    if (phase_ != PttPhase::SILENT) {
        throw AlreadyActive();
    }
    // The request may throw (asleep, session limit); the user stays SILENT
    // in that case, so a later press can retry.
    const std::uint16_t session =
        mac_.ptt_request(destination, 0, kRate2400, now_us);
    phase_ = PttPhase::PRESSED_WAITING;
    session_ = session;
    press_us_ = now_us;
    talk_duration_us_ = talk_duration_us;
    release_at_us_ = -1;
    if (cb_.trace) {
        cb_.trace(TraceEvent{now_us, node_, "ptt_press",
                             {{"session", std::int64_t{session}},
                              {"dest", destination},
                              {"talk_us", talk_duration_us}}});
    }
}

void PttUser::handle_established(std::uint16_t session, std::int64_t t_us)
{
    if (phase_ != PttPhase::PRESSED_WAITING || session != session_) {
        return;
    }
    phase_ = PttPhase::TALKING;
    release_at_us_ = t_us + talk_duration_us_;
    if (cb_.trace) {
        cb_.trace(TraceEvent{t_us, node_, "ptt_talking",
                             {{"session", std::int64_t{session}},
                              {"latency_us", t_us - press_us_}}});
    }
    if (cb_.established) {
        cb_.established(session, press_us_, t_us);
    }
    // First frame at establishment, then one per vocoder interval. The
    // release is scheduled first so it wins a shared timestamp and the last
    // interval produces no fractional frame.
    schedule_(release_at_us_, [this, session] {
        if (phase_ != PttPhase::TALKING || session != session_) {
            return;
        }
        phase_ = PttPhase::RELEASING;
        const std::int64_t t = release_at_us_;
        if (cb_.trace) {
            cb_.trace(TraceEvent{t, node_, "ptt_release",
                                 {{"session", std::int64_t{session}}}});
        }
        mac_.ptt_release(session, t);
    });
    schedule_(t_us, [this, session, t_us] { generate_frame(session, 0, t_us); });
}

void PttUser::generate_frame(std::uint16_t session, std::uint64_t index, std::int64_t t_us)
{
    if (phase_ != PttPhase::TALKING || session != session_) {
        return;
    }
    // Synthetic coded frame: session id tag plus a frame counter, so a
    // delivered payload identifies its origin exactly.
    const std::uint64_t payload =
        (static_cast<std::uint64_t>(session & 0x7FFF) << 39)
        | (index & ((1ull << 39) - 1));
    if (cb_.frame_generated) {
        cb_.frame_generated(session, t_us);
    }
    mac_.enqueue_voice(session, payload, t_us);
    const std::int64_t next_us = t_us + 22500;
    schedule_(next_us, [this, session, index, next_us] {
        generate_frame(session, index + 1, next_us);
    });
}

void PttUser::handle_failed(std::uint16_t session, std::int64_t t_us,
                            const std::string& reason)
{
    if (session != session_) {
        return;
    }
    if (cb_.trace) {
        cb_.trace(TraceEvent{t_us, node_, "ptt_failed",
                             {{"session", std::int64_t{session}},
                              {"reason", reason}}});
    }
    if (cb_.failed) {
        cb_.failed(session, reason);
    }
    phase_ = PttPhase::SILENT;
    session_ = 0;
}

void PttUser::handle_closed(std::uint16_t session, std::int64_t t_us)
{
    (void)t_us;
    if (session != session_) {
        return;
    }
    phase_ = PttPhase::SILENT;
    session_ = 0;
}

std::vector<SyntheticPress> synthetic_press_script(int nodes, std::int64_t duration_us,
                                                   std::int64_t mean_silence_us,
                                                   std::int64_t mean_talk_us,
                                                   double broadcast_fraction,
                                                   SplitMix64& rng)
{
    // Talk spurts shorter than two vocoder intervals carry almost nothing;
    // clamp so every press produces a measurable stream.
    constexpr std::int64_t kMinTalkUs = 45000;

    const auto exponential = [&rng](std::int64_t mean) {
        const double u = rng.next_unit();
        return static_cast<std::int64_t>(-static_cast<double>(mean) * std::log1p(-u));
    };

    std::vector<SyntheticPress> script;
    for (int node = 0; node < nodes; ++node) {
        std::int64_t t = exponential(mean_silence_us);
        while (t < duration_us) {
            const std::int64_t talk = std::max<std::int64_t>(
                kMinTalkUs, exponential(mean_talk_us));
            int dest = -1;
            if (nodes > 1 && rng.next_unit() >= broadcast_fraction) {
                const int other =
                    static_cast<int>(rng.next_below(static_cast<std::uint32_t>(nodes - 1)));
                dest = other >= node ? other + 1 : other;
            }
            script.push_back(SyntheticPress{node, t, talk, dest});
            // Next press no earlier than the previous spurt has wound down,
            // including the session release round trip.
            t += talk + 2 * kMinTalkUs + exponential(mean_silence_us);
        }
    }
    std::sort(script.begin(), script.end(),
              [](const SyntheticPress& a, const SyntheticPress& b) {
                  return a.press_us != b.press_us ? a.press_us < b.press_us
                                                  : a.node < b.node;
              });
    return script;
}

} // namespace wbwf
