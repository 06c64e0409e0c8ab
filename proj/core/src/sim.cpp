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

#include "wbwf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wbwf/channel.hpp"
#include "wbwf/errors.hpp"
#include "wbwf/mac.hpp"
#include "wbwf/ptt.hpp"
#include "wbwf/rng.hpp"

namespace wbwf {

void EventQueue::schedule(std::int64_t t_us, EventBand band, std::function<void()> fn)
{
    heap_.push(Entry{t_us, static_cast<int>(band), seq_++, std::move(fn)});
}

bool EventQueue::run_next()
{
    if (heap_.empty()) {
        return false;
    }
    // top() is const; moving out is safe because the entry is popped before
    // anything can observe it again.
    Entry entry = std::move(const_cast<Entry&>(heap_.top()));
    heap_.pop();
    now_ = entry.t_us;
    entry.fn();
    return true;
}

namespace {

struct NodeRuntime {
    NodeSpec spec;
    SplitMix64 rx_rng{0};
    std::unique_ptr<MacNode> mac;
    std::unique_ptr<PttUser> user;
    std::set<int> claims; // bitmap entries the medium accepts transmissions in
    std::int64_t tsa_selects = 0;
    std::int64_t tsa_reselects = 0;
    std::int64_t tsa_conflicts = 0;
    std::int64_t tsa_confirms = 0;
    std::int64_t tsa_releases = 0;
};

struct ReceiverTally {
    std::int64_t delivered = 0;
    std::int64_t filtered = 0;
    std::vector<std::int64_t> latencies_us;
};

struct SessionTally {
    int initiator = -1;
    int dest_node = -1; // -1 is broadcast
    std::int64_t press_us = -1;
    std::int64_t established_us = -1;
    bool established = false;
    bool failed = false;
    std::int64_t frames_generated = 0;
    std::int64_t frames_sent = 0;
    std::int64_t frames_dropped = 0;
    std::map<int, ReceiverTally> receivers; // keyed by node index
};

struct SentPdu {
    std::uint16_t session = 0;
    std::vector<std::int64_t> generated_us;
};

} // namespace

RunResult run(const Scenario& scenario, bool with_trace)
{
    validate_scenario(scenario);
    const TdmaConfig& cfg = scenario.tdma;
    const ChannelParams& channel = scenario.channel;
    const std::int64_t duration = scenario.duration_us;

    TraceSink sink(with_trace);
    EventQueue queue;

    // Nodes in index order; the order is the tiebreak everywhere below.
    std::vector<NodeSpec> specs = scenario.nodes;
    std::sort(specs.begin(), specs.end(),
              [](const NodeSpec& a, const NodeSpec& b) { return a.index < b.index; });
    const int n = static_cast<int>(specs.size());

    // Pairwise link budget is position-static; compute it once.
    const double floor_dbm = noise_floor_dbm(channel);
    std::vector<std::vector<double>> dist_m(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> power_dbm(n, std::vector<double>(n, -1e30));
    std::vector<std::vector<double>> link_snr_db(n, std::vector<double>(n, -1e30));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double dx = specs[i].x_m - specs[j].x_m;
            const double dy = specs[i].y_m - specs[j].y_m;
            const double d = std::sqrt(dx * dx + dy * dy);
            dist_m[i][j] = d;
            power_dbm[i][j] = rx_power_dbm(d, channel);
            link_snr_db[i][j] = snr_db(d, channel);
        }
    }

    std::map<int, int> row_of; // node index -> row in specs/runtimes
    std::map<std::uint64_t, int> addr_row;
    for (int i = 0; i < n; ++i) {
        row_of[specs[i].index] = i;
        addr_row[node_address(specs[i].index)] = i;
    }

    // Shared tallies, filled through the engine callbacks so metrics do not
    // depend on tracing being enabled.
    std::map<std::uint16_t, SessionTally> session_m;
    std::map<std::pair<int, std::uint16_t>, SentPdu> sent_pdus; // (row, seq)
    std::map<int, std::uint16_t> last_session_of_row;
    std::int64_t presses_ignored = 0;
    std::int64_t slot_collisions = 0;
    std::int64_t collisions_sensed = 0;
    std::int64_t last_disturbance_us = 0;
    std::int64_t slot_total[3] = {0, 0, 0};
    std::int64_t slot_occupied[3] = {0, 0, 0};

    std::deque<NodeRuntime> nodes;
    for (int i = 0; i < n; ++i) {
        nodes.emplace_back();
        NodeRuntime* rt = &nodes.back();
        rt->spec = specs[i];
        rt->rx_rng = substream(scenario.seed, RngStream::PhyReception,
                               static_cast<std::uint32_t>(specs[i].index));

        MacCallbacks mcb;
        if (with_trace) {
            mcb.trace = [&sink](const TraceEvent& ev) { sink.emit(ev); };
        }
        mcb.tsa = [&, rt, i](int, TsaEvent event, SlotKind, int entry, int old_entry) {
            switch (event) {
            case TsaEvent::SELECT:
                rt->claims.insert(entry);
                ++rt->tsa_selects;
                break;
            case TsaEvent::RESELECT:
                if (old_entry >= 0) {
                    rt->claims.erase(old_entry);
                }
                rt->claims.insert(entry);
                ++rt->tsa_reselects;
                last_disturbance_us = std::max(last_disturbance_us, queue.now());
                break;
            case TsaEvent::CONFLICT:
                rt->claims.erase(entry);
                ++rt->tsa_conflicts;
                break;
            case TsaEvent::CONFIRM:
                ++rt->tsa_confirms;
                break;
            case TsaEvent::RELEASE:
                rt->claims.erase(entry);
                ++rt->tsa_releases;
                break;
            }
            (void)i;
        };
        mcb.session_established = [rt](std::uint16_t sid, std::int64_t t) {
            rt->user->handle_established(sid, t);
        };
        mcb.session_failed = [&, rt](std::uint16_t sid, std::int64_t t,
                                     const std::string& reason) {
            const auto it = session_m.find(sid);
            if (it != session_m.end()) {
                it->second.failed = true;
            }
            rt->user->handle_failed(sid, t, reason);
        };
        mcb.session_closed = [rt](std::uint16_t sid, std::int64_t t) {
            rt->user->handle_closed(sid, t);
        };
        mcb.voice_transmitted = [&, i](std::uint16_t sid, std::uint16_t seq,
                                       const std::vector<std::int64_t>& generated) {
            session_m[sid].frames_sent += static_cast<std::int64_t>(generated.size());
            sent_pdus[{i, seq}] = SentPdu{sid, generated};
            last_session_of_row[i] = sid;
        };
        mcb.voice_delivered = [&, i](std::uint16_t sid_rx, std::uint64_t tx_addr,
                                     std::uint16_t seq, int count, std::int64_t t) {
            std::uint16_t sid = sid_rx;
            const SentPdu* rec = nullptr;
            const auto row_it = addr_row.find(tx_addr);
            if (row_it != addr_row.end()) {
                const auto pit = sent_pdus.find({row_it->second, seq});
                if (pit != sent_pdus.end()) {
                    rec = &pit->second;
                    sid = pit->second.session;
                }
            }
            ReceiverTally& tally = session_m[sid].receivers[nodes[i].spec.index];
            tally.delivered += count;
            if (rec) {
                const int m = std::min<int>(count,
                                            static_cast<int>(rec->generated_us.size()));
                for (int k = 0; k < m; ++k) {
                    tally.latencies_us.push_back(t - rec->generated_us[k]);
                }
            }
        };
        mcb.voice_filtered = [&, i](std::uint16_t sid_rx, std::uint64_t tx_addr,
                                    int count, std::int64_t) {
            std::uint16_t sid = sid_rx;
            const auto row_it = addr_row.find(tx_addr);
            if (sid == 0 && row_it != addr_row.end()) {
                const auto lit = last_session_of_row.find(row_it->second);
                if (lit != last_session_of_row.end()) {
                    sid = lit->second;
                }
            }
            session_m[sid].receivers[nodes[i].spec.index].filtered += count;
        };
        mcb.voice_dropped = [&](std::uint16_t sid, int count, std::int64_t) {
            session_m[sid].frames_dropped += count;
        };

        MacNode::Params params;
        params.node_index = specs[i].index;
        params.address = node_address(specs[i].index);
        params.mgmt_slot = specs[i].mgmt_slot;
        rt->mac = std::make_unique<MacNode>(
            params, cfg,
            substream(scenario.seed, RngStream::MacTsa,
                      static_cast<std::uint32_t>(specs[i].index)),
            std::move(mcb));

        PttUser::Callbacks pcb;
        if (with_trace) {
            pcb.trace = [&sink](const TraceEvent& ev) { sink.emit(ev); };
        }
        pcb.frame_generated = [&](std::uint16_t sid, std::int64_t) {
            ++session_m[sid].frames_generated;
        };
        pcb.established = [&](std::uint16_t sid, std::int64_t press_us, std::int64_t t) {
            SessionTally& tally = session_m[sid];
            tally.established = true;
            tally.established_us = t;
            tally.press_us = press_us;
        };
        // User-model timers past the horizon never fire; residual queue
        // content is accounted as dropped at the end of the run.
        PttUser::Scheduler scheduler = [&queue, duration](std::int64_t when,
                                                          std::function<void()> fn) {
            if (when >= duration) {
                return;
            }
            queue.schedule(when, EventBand::User, std::move(fn));
        };
        rt->user = std::make_unique<PttUser>(specs[i].index, *rt->mac, scheduler,
                                             std::move(pcb));
    }

    // Scripted user actions.
    for (const PressSpec& press : scenario.presses) {
        if (press.press_us >= duration) {
            continue;
        }
        NodeRuntime* rt = &nodes[static_cast<std::size_t>(row_of.at(press.node))];
        const std::uint64_t dest =
            press.dest_node < 0 ? kBroadcastAddress : node_address(press.dest_node);
        queue.schedule(press.press_us, EventBand::User, [&, rt, dest, press] {
            try {
                rt->user->press(dest, press.talk_us, queue.now());
                SessionTally& tally = session_m[rt->user->active_session()];
                tally.initiator = rt->spec.index;
                tally.dest_node = press.dest_node;
                tally.press_us = queue.now();
            } catch (const MacError& e) {
                ++presses_ignored;
                if (with_trace) {
                    sink.emit(TraceEvent{queue.now(), rt->spec.index, "press_ignored",
                                         {{"reason", std::string(e.what())}}});
                }
            }
        });
    }
    for (const SleepSpec& sleep : scenario.sleeps) {
        NodeRuntime* rt = &nodes[static_cast<std::size_t>(row_of.at(sleep.node))];
        if (sleep.start_us < duration) {
            queue.schedule(sleep.start_us, EventBand::User,
                           [rt, &queue] { rt->mac->enter_sleep(queue.now()); });
        }
        if (sleep.end_us < duration) {
            queue.schedule(sleep.end_us, EventBand::User,
                           [rt, &queue] { rt->mac->wake(queue.now()); });
        }
    }

    // Medium: resolves one slot at its end, for every awake non-transmitting
    // receiver, by strongest sensed transmission against the co-slot
    // interference. One reception draw per receiver per contested slot.
    auto deliver = [&](const std::vector<Transmission>& txs, const SlotRef& slot) {
        const std::int64_t t = slot.end_us;
        const std::int64_t bits = cfg.slot_data_bits(slot.kind);
        for (int r = 0; r < n; ++r) {
            NodeRuntime& rx = nodes[static_cast<std::size_t>(r)];
            bool transmitting = false;
            for (const Transmission& tx : txs) {
                transmitting = transmitting || tx.node == rx.spec.index;
            }
            if (transmitting || rx.mac->asleep()) {
                continue;
            }
            int best = -1;
            int sensed = 0;
            double best_dbm = 0;
            for (std::size_t i = 0; i < txs.size(); ++i) {
                const double dbm = power_dbm[row_of.at(txs[i].node)][r];
                if (dbm < floor_dbm) {
                    continue;
                }
                ++sensed;
                if (best < 0 || dbm > best_dbm) {
                    best = static_cast<int>(i);
                    best_dbm = dbm;
                }
            }
            if (best < 0) {
                continue; // nothing above the noise floor at this receiver
            }
            const Transmission& want = txs[static_cast<std::size_t>(best)];
            const int want_row = row_of.at(want.node);
            LinkSample wanted;
            wanted.distance_m = dist_m[want_row][r];
            wanted.rx_power_dbm = power_dbm[want_row][r];
            wanted.snr_db = link_snr_db[want_row][r];
            std::vector<double> interferers;
            for (std::size_t i = 0; i < txs.size(); ++i) {
                if (static_cast<int>(i) != best) {
                    interferers.push_back(power_dbm[row_of.at(txs[i].node)][r]);
                }
            }
            const double sinr = sinr_with_interference(wanted, interferers);
            const double pe = per(sinr, bits, channel);
            const double draw = rx.rx_rng.next_unit();
            if (receive_decision(pe, draw)) {
                if (with_trace) {
                    sink.emit(TraceEvent{
                        t, rx.spec.index, "rx_ok",
                        {{"from", std::int64_t{want.node}},
                         {"slot_kind", std::string(to_string(slot.kind))},
                         {"slot_in_frame", std::int64_t{slot.slot_id_in_frame}},
                         {"type", std::string(to_string(want.pdu.header.fc.type))},
                         {"seq", std::int64_t{want.pdu.header.sequence}},
                         {"to", want.pdu.header.receiver},
                         {"sdus", std::int64_t{want.pdu.header.fc.encapsulated_sdus}}}});
                }
                rx.mac->on_receive(want.bits, slot, t);
            } else if (sensed >= 2 && slot.kind != SlotKind::MGMT) {
                ++collisions_sensed;
                last_disturbance_us = std::max(last_disturbance_us, t);
                if (with_trace) {
                    sink.emit(TraceEvent{
                        t, rx.spec.index, "collision_sensed",
                        {{"slot_kind", std::string(to_string(slot.kind))},
                         {"slot_in_frame", std::int64_t{slot.slot_id_in_frame}},
                         {"slot_in_cycle", std::int64_t{slot.slot_id_in_cycle}},
                         {"transmitters", std::int64_t{sensed}}}});
                }
                rx.mac->on_collision_sensed(slot, t);
            } else if (with_trace) {
                sink.emit(TraceEvent{
                    t, rx.spec.index, "rx_lost",
                    {{"from", std::int64_t{want.node}},
                     {"slot_kind", std::string(to_string(slot.kind))},
                     {"slot_in_frame", std::int64_t{slot.slot_id_in_frame}},
                     {"reason", std::string("channel")}}});
            }
        }
    };

    // Slot boundaries chain through the queue, one frame's timetable looped
    // over the run duration.
    const std::vector<SlotScheduleEntry> frame_slots = slot_schedule(cfg);
    std::function<void(std::uint64_t, std::size_t)> boundary;
    boundary = [&](std::uint64_t frame, std::size_t index) {
        const SlotScheduleEntry& entry = frame_slots[index];
        SlotRef slot;
        slot.kind = entry.kind;
        slot.slot_id_in_frame = entry.slot_id_in_frame;
        slot.frame_number = frame;
        slot.frame_index =
            static_cast<int>(frame % static_cast<std::uint64_t>(cfg.cycle_frames(entry.kind)));
        slot.slot_id_in_cycle = slot.frame_index * cfg.slots_in_frame(entry.kind)
            + (entry.slot_id_in_frame - cfg.region_base(entry.kind));
        slot.start_us =
            static_cast<std::int64_t>(frame) * cfg.frame_length_us + entry.start_us;
        slot.end_us = slot.start_us + entry.duration_us;

        const int rt_cycle_slots = cfg.rt_slots * cfg.rt_cycle_frames;
        const int bitmap_entry = slot.kind == SlotKind::MGMT
            ? -1
            : (slot.kind == SlotKind::RT ? slot.slot_id_in_cycle
                                         : rt_cycle_slots + slot.slot_id_in_cycle);

        std::vector<Transmission> txs;
        for (int i = 0; i < n; ++i) {
            NodeRuntime& rt = nodes[static_cast<std::size_t>(i)];
            // The permission snapshot precedes the engine call: a release
            // built inside it gives up the claim the same transmission
            // rides on.
            const bool allowed = slot.kind == SlotKind::MGMT
                ? slot.slot_id_in_cycle == rt.spec.mgmt_slot
                : rt.claims.count(bitmap_entry) > 0;
            std::optional<Transmission> tx = rt.mac->on_slot_boundary(slot, slot.start_us);
            if (!tx) {
                continue;
            }
            if (!allowed) {
                throw ProtocolViolation(
                    "node " + std::to_string(rt.spec.index) + " transmitted in "
                    + std::string(to_string(slot.kind)) + " slot "
                    + std::to_string(slot.slot_id_in_cycle) + " at t="
                    + std::to_string(slot.start_us)
                    + " us without holding that slot");
            }
            if (with_trace) {
                sink.emit(TraceEvent{
                    slot.start_us, rt.spec.index, "tx",
                    {{"slot_kind", std::string(to_string(slot.kind))},
                     {"frame", static_cast<std::int64_t>(slot.frame_number)},
                     {"slot_in_frame", std::int64_t{slot.slot_id_in_frame}},
                     {"slot_in_cycle", std::int64_t{slot.slot_id_in_cycle}},
                     {"type", std::string(to_string(tx->pdu.header.fc.type))},
                     {"subtype", std::int64_t{tx->pdu.header.fc.subtype}},
                     {"seq", std::int64_t{tx->pdu.header.sequence}},
                     {"to", tx->pdu.header.receiver},
                     {"sdus", std::int64_t{tx->pdu.header.fc.encapsulated_sdus}}}});
            }
            txs.push_back(std::move(*tx));
        }

        ++slot_total[static_cast<int>(slot.kind)];
        if (!txs.empty()) {
            ++slot_occupied[static_cast<int>(slot.kind)];
            if (txs.size() >= 2) {
                ++slot_collisions;
            }
            queue.schedule(slot.end_us, EventBand::Delivery,
                           [&deliver, txs = std::move(txs), slot] { deliver(txs, slot); });
        }

        std::uint64_t next_frame = frame;
        std::size_t next_index = index + 1;
        if (next_index == frame_slots.size()) {
            ++next_frame;
            next_index = 0;
        }
        const std::int64_t next_start =
            static_cast<std::int64_t>(next_frame) * cfg.frame_length_us
            + frame_slots[next_index].start_us;
        if (next_start < duration) {
            queue.schedule(next_start, EventBand::SlotBoundary,
                           [&boundary, next_frame, next_index] {
                               boundary(next_frame, next_index);
                           });
        }
    };
    queue.schedule(0, EventBand::SlotBoundary, [&boundary] { boundary(0, 0); });

    while (queue.run_next()) {
    }

    // Frames still queued when the horizon closed never left the node.
    for (int i = 0; i < n; ++i) {
        const NodeRuntime& rt = nodes[static_cast<std::size_t>(i)];
        for (const auto& [sid, session] : rt.mac->sessions()) {
            if (session.role != SessionRole::INITIATOR) {
                continue;
            }
            const auto len =
                static_cast<std::int64_t>(rt.mac->voice_queue_length(sid));
            if (len > 0) {
                session_m[sid].frames_dropped += len;
            }
        }
    }

    // --- report assembly ---
    MetricsReport report;
    report.set("run", "-", "-", "duration_us", duration);
    report.set("run", "-", "-", "seed", static_cast<std::int64_t>(scenario.seed));
    report.set("run", "-", "-", "nodes", std::int64_t{n});
    report.set("run", "-", "-", "presses",
               static_cast<std::int64_t>(scenario.presses.size()));
    report.set("run", "-", "-", "frame_length_us", cfg.frame_length_us);

    std::int64_t requested = 0;
    std::int64_t established = 0;
    std::int64_t failed = 0;
    std::int64_t generated = 0;
    std::int64_t sent = 0;
    std::int64_t delivered = 0;
    std::int64_t filtered = 0;
    std::int64_t dropped = 0;
    for (const auto& [sid, tally] : session_m) {
        if (tally.initiator < 0) {
            continue; // defensive: unattributed receiver-side tally
        }
        ++requested;
        established += tally.established ? 1 : 0;
        failed += tally.failed ? 1 : 0;
        generated += tally.frames_generated;
        sent += tally.frames_sent;
        dropped += tally.frames_dropped;

        const std::string sess = std::to_string(sid);
        report.set("ptt", sess, "-", "initiator", std::int64_t{tally.initiator});
        report.set("ptt", sess, "-", "dest_node", std::int64_t{tally.dest_node});
        report.set("ptt", sess, "-", "press_us", tally.press_us);
        report.set("ptt", sess, "-", "established", std::int64_t{tally.established ? 1 : 0});
        report.set("ptt", sess, "-", "failed", std::int64_t{tally.failed ? 1 : 0});
        if (tally.established) {
            report.set("ptt", sess, "-", "established_us", tally.established_us);
            report.set("ptt", sess, "-", "access_latency_us",
                       tally.established_us - tally.press_us);
        }
        report.set("ptt", sess, "-", "frames_generated", tally.frames_generated);
        report.set("ptt", sess, "-", "frames_sent", tally.frames_sent);
        report.set("ptt", sess, "-", "frames_dropped", tally.frames_dropped);

        for (const auto& [node_index, rx] : tally.receivers) {
            delivered += rx.delivered;
            filtered += rx.filtered;
            const std::string recv = std::to_string(node_index);
            report.set("ptt", sess, recv, "frames_delivered", rx.delivered);
            report.set("ptt", sess, recv, "frames_filtered", rx.filtered);
            const std::int64_t lost =
                std::max<std::int64_t>(0, tally.frames_sent - rx.delivered - rx.filtered);
            report.set("ptt", sess, recv, "frames_lost", lost);
            if (tally.frames_sent > 0) {
                report.set("ptt", sess, recv, "delivery_ratio",
                           static_cast<double>(rx.delivered)
                               / static_cast<double>(tally.frames_sent));
            }
            if (!rx.latencies_us.empty()) {
                std::vector<std::int64_t> sorted = rx.latencies_us;
                std::sort(sorted.begin(), sorted.end());
                report.set("ptt", sess, recv, "latency_p50_us",
                           percentile_nearest_rank(sorted, 50.0));
                report.set("ptt", sess, recv, "latency_p95_us",
                           percentile_nearest_rank(sorted, 95.0));
                report.set("ptt", sess, recv, "latency_max_us", sorted.back());
            }
        }
        // A unicast destination that received nothing still gets its row.
        if (tally.dest_node >= 0 && !tally.receivers.count(tally.dest_node)) {
            const std::string recv = std::to_string(tally.dest_node);
            report.set("ptt", sess, recv, "frames_delivered", std::int64_t{0});
            report.set("ptt", sess, recv, "frames_filtered", std::int64_t{0});
            report.set("ptt", sess, recv, "frames_lost", tally.frames_sent);
            if (tally.frames_sent > 0) {
                report.set("ptt", sess, recv, "delivery_ratio", 0.0);
            }
        }
    }
    report.set("net", "-", "-", "sessions_requested", requested);
    report.set("net", "-", "-", "sessions_established", established);
    report.set("net", "-", "-", "sessions_failed", failed);
    report.set("net", "-", "-", "frames_generated", generated);
    report.set("net", "-", "-", "frames_sent", sent);
    report.set("net", "-", "-", "frames_delivered", delivered);
    report.set("net", "-", "-", "frames_filtered", filtered);
    report.set("net", "-", "-", "frames_dropped", dropped);
    report.set("net", "-", "-", "presses_ignored", presses_ignored);
    report.set("net", "-", "-", "slot_collisions", slot_collisions);
    report.set("net", "-", "-", "collisions_sensed", collisions_sensed);
    report.set("net", "-", "-", "convergence_time_us", last_disturbance_us);

    std::int64_t tsa_totals[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const NodeRuntime& rt = nodes[static_cast<std::size_t>(i)];
        const std::string recv = std::to_string(rt.spec.index);
        report.set("tsa", "-", recv, "selects", rt.tsa_selects);
        report.set("tsa", "-", recv, "reselects", rt.tsa_reselects);
        report.set("tsa", "-", recv, "conflicts", rt.tsa_conflicts);
        report.set("tsa", "-", recv, "confirms", rt.tsa_confirms);
        report.set("tsa", "-", recv, "releases", rt.tsa_releases);
        tsa_totals[0] += rt.tsa_selects;
        tsa_totals[1] += rt.tsa_reselects;
        tsa_totals[2] += rt.tsa_conflicts;
        tsa_totals[3] += rt.tsa_confirms;
        tsa_totals[4] += rt.tsa_releases;
    }
    report.set("tsa", "-", "-", "selects", tsa_totals[0]);
    report.set("tsa", "-", "-", "reselects", tsa_totals[1]);
    report.set("tsa", "-", "-", "conflicts", tsa_totals[2]);
    report.set("tsa", "-", "-", "confirms", tsa_totals[3]);
    report.set("tsa", "-", "-", "releases", tsa_totals[4]);

    const char* kind_names[3] = {"mgmt", "rt", "be"};
    for (int k = 0; k < 3; ++k) {
        const std::string prefix = kind_names[k];
        report.set("util", "-", "-", prefix + "_slot_occurrences", slot_total[k]);
        report.set("util", "-", "-", prefix + "_slots_transmitted", slot_occupied[k]);
        if (slot_total[k] > 0) {
            report.set("util", "-", "-", prefix + "_occupancy",
                       static_cast<double>(slot_occupied[k])
                           / static_cast<double>(slot_total[k]));
        }
    }

    RunResult result;
    result.metrics = std::move(report);
    result.trace_lines = sink.lines();
    return result;
}

} // namespace wbwf
