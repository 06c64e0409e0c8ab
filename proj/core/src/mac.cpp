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

#include "wbwf/mac.hpp"

#include <algorithm>

#include "wbwf/errors.hpp"

namespace wbwf {

namespace {

// How long a direct observation (decoded frame, sensed collision) stays in
// the emitted bitmap, and how long a neighbour report takes part in fusion.
constexpr int kObservationTtlFrames = 2;
constexpr int kNeighborFreshCycles = 1;
// A silent receiver-side session is garbage collected after this many frames.
constexpr int kReceiverGcFrames = 4;

SlotUse max_use(SlotUse a, SlotUse b)
{
    return static_cast<std::uint8_t>(a) >= static_cast<std::uint8_t>(b) ? a : b;
}

} // namespace

const char* to_string(MainState state)
{
    switch (state) {
    case MainState::IDLE: return "idle";
    case MainState::TX: return "tx";
    case MainState::RX: return "rx";
    case MainState::SLEEP: return "sleep";
    case MainState::SEARCH_RT: return "search_rt";
    case MainState::SEARCH_BE: return "search_be";
    case MainState::SEARCH_BOTH: return "search_both";
    }
    return "?";
}

const char* to_string(SessionPhase phase)
{
    switch (phase) {
    case SessionPhase::REQUESTING: return "requesting";
    case SessionPhase::WAIT_RESPONSES: return "wait_responses";
    case SessionPhase::SPEECH: return "speech";
    case SessionPhase::RELEASING: return "releasing";
    case SessionPhase::CLOSED: return "closed";
    }
    return "?";
}

MacNode::MacNode(Params params, const TdmaConfig& cfg, SplitMix64 tsa_rng,
                 MacCallbacks callbacks)
    : params_(params), cfg_(cfg), tsa_rng_(tsa_rng), cb_(std::move(callbacks))
{
}

void MacNode::trace(std::int64_t t_us, const char* kind,
                    std::vector<TraceField> fields) const
{
    if (cb_.trace) {
        cb_.trace(TraceEvent{t_us, params_.node_index, kind, std::move(fields)});
    }
}

std::uint16_t MacNode::next_sequence()
{
    const std::uint16_t seq = sequence_counter_;
    sequence_counter_ = (sequence_counter_ + 1) & 0x0FFF;
    return seq;
}

int MacNode::bitmap_entry(SlotKind kind, int slot_id_in_cycle) const
{
    const int rt_cycle_slots = cfg_.rt_slots * cfg_.rt_cycle_frames;
    switch (kind) {
    case SlotKind::RT: return slot_id_in_cycle;
    case SlotKind::BE: return rt_cycle_slots + slot_id_in_cycle;
    case SlotKind::MGMT: return -1; // MGMT slots are fixed, never in the bitmap
    }
    return -1;
}

MainState MacNode::main_state() const
{
    if (sleeping_) {
        return MainState::SLEEP;
    }
    bool rt = false;
    bool be = false;
    for (const PendingSearch& s : pending_searches_) {
        rt = rt || s.kind == SlotKind::RT;
        be = be || s.kind == SlotKind::BE;
    }
    if (rt && be) {
        return MainState::SEARCH_BOTH;
    }
    if (rt) {
        return MainState::SEARCH_RT;
    }
    if (be) {
        return MainState::SEARCH_BE;
    }
    if (in_tx_slot_) {
        return MainState::TX;
    }
    for (const auto& [sid, session] : sessions_) {
        if (session.role == SessionRole::RESPONDER
            && session.phase == SessionPhase::SPEECH) {
            return MainState::RX;
        }
    }
    return MainState::IDLE;
}

std::size_t MacNode::voice_queue_length(std::uint16_t session_id) const
{
    const auto it = voice_queues_.find(session_id);
    return it == voice_queues_.end() ? 0 : it->second.size();
}

SlotBitmap MacNode::own_view(std::int64_t now_us) const
{
    SlotBitmap view = SlotBitmap::idle(cfg_.data_slots_per_cycle());

    // Direct observations: decoded traffic or sensed collisions, while fresh.
    for (const auto& [entry, obs] : observations_) {
        if (obs.expires_us > now_us) {
            view.entries[entry] = max_use(view.entries[entry], obs.code);
        }
    }

    // Claim analysis over fresh neighbour reports: one claimant marks the
    // slot occupied, two or more claimants are a collision in the making
    // even if this node never hears them overlap. This is what carries
    // hidden-node conflicts to the owners.
    const std::int64_t fresh_horizon = kNeighborFreshCycles * cfg_.mgmt_cycle_us();
    std::map<int, int> claimants;
    for (const auto& [addr, neighbor] : neighbors_) {
        if (now_us - neighbor.heard_us > fresh_horizon) {
            continue;
        }
        for (std::size_t i = 0; i < neighbor.bitmap.entries.size(); ++i) {
            if (neighbor.bitmap.entries[i] == SlotUse::TRANSMITTING) {
                ++claimants[static_cast<int>(i)];
            }
        }
    }
    for (const auto& [entry, count] : claimants) {
        const SlotUse code =
            count >= 2 ? SlotUse::COLLISION : SlotUse::NEIGHBOUR_TRANSMITTING;
        view.entries[entry] = max_use(view.entries[entry], code);
    }

    // Own claims override: the node asserts its slots as TRANSMITTING even
    // while a conflict is being resolved.
    for (const auto& [entry, owned] : owned_) {
        view.entries[entry] = SlotUse::TRANSMITTING;
    }
    return view;
}

SlotBitmap MacNode::merged_view(std::int64_t now_us) const
{
    SlotBitmap view = own_view(now_us);
    const std::int64_t fresh_horizon = kNeighborFreshCycles * cfg_.mgmt_cycle_us();
    for (const auto& [addr, neighbor] : neighbors_) {
        if (now_us - neighbor.heard_us > fresh_horizon) {
            continue;
        }
        for (std::size_t i = 0; i < neighbor.bitmap.entries.size(); ++i) {
            SlotUse code = neighbor.bitmap.entries[i];
            if (code == SlotUse::IDLE) {
                continue;
            }
            if (code == SlotUse::TRANSMITTING) {
                // The neighbour's own slot is, from here, a neighbour's slot.
                code = SlotUse::NEIGHBOUR_TRANSMITTING;
            }
            if (owned_.count(static_cast<int>(i))) {
                continue; // own claims stay asserted in the merged view too
            }
            view.entries[i] = max_use(view.entries[i], code);
        }
    }
    return view;
}

// --- service primitives ---

std::uint16_t MacNode::ptt_request(std::uint64_t destination, std::uint8_t codec,
                                   std::uint8_t rate, std::int64_t now_us)
{
    if (sleeping_) {
        throw MacError("node is asleep");
    }
    if (static_cast<int>(sessions_.size()) >= params_.max_sessions) {
        throw SessionLimitReached();
    }
    // Counter cycles 1..63: id 0 stays reserved for "no session known".
    const std::uint16_t sid = static_cast<std::uint16_t>(
        (static_cast<unsigned>(params_.mgmt_slot) << 6) | (session_counter_ + 1u));
    session_counter_ = static_cast<std::uint8_t>((session_counter_ + 1) % 63);

    PttSessionState session;
    session.session_id = sid;
    session.role = SessionRole::INITIATOR;
    session.phase = SessionPhase::REQUESTING;
    session.peer = destination;
    session.codec = codec;
    session.rate = rate;
    session.last_activity_us = now_us;
    sessions_[sid] = session;

    trace(now_us, "ptt_request",
          {{"session", std::int64_t{sid}},
           {"dest", static_cast<std::uint64_t>(destination)}});

    pending_searches_.push_back(PendingSearch{SlotKind::RT, sid, 0, now_us});
    run_pending_searches(now_us);
    return sid;
}

void MacNode::ptt_release(std::uint16_t session_id, std::int64_t now_us)
{
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.role != SessionRole::INITIATOR) {
        throw UnknownSession(session_id);
    }
    PttSessionState& session = it->second;
    if (session.phase == SessionPhase::RELEASING) {
        return;
    }
    session.phase = SessionPhase::RELEASING;
    session.last_activity_us = now_us;
    trace(now_us, "ptt_releasing",
          {{"session", std::int64_t{session_id}},
           {"queued", static_cast<std::int64_t>(voice_queue_length(session_id))}});
}

void MacNode::enqueue_voice(std::uint16_t session_id, std::uint64_t payload,
                            std::int64_t now_us)
{
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.role != SessionRole::INITIATOR) {
        throw UnknownSession(session_id);
    }
    if (it->second.phase != SessionPhase::SPEECH) {
        throw MacError("voice frames require an established session");
    }
    voice_queues_[session_id].push_back(QueuedVoice{payload, now_us});
}

void MacNode::enter_sleep(std::int64_t now_us)
{
    if (sleeping_) {
        return;
    }
    sleeping_ = true;
    in_tx_slot_ = false;
    trace(now_us, "sleep", {});
    // Radio silence invalidates everything the node asserted on the air.
    // Initiated sessions fail (the talker goes dark); received sessions
    // simply end.
    std::vector<std::uint16_t> initiated;
    std::vector<std::uint16_t> received;
    for (const auto& [sid, session] : sessions_) {
        (session.role == SessionRole::INITIATOR ? initiated : received).push_back(sid);
    }
    for (std::uint16_t sid : initiated) {
        const auto it = sessions_.find(sid);
        if (it != sessions_.end()) {
            fail_session(it->second, now_us, "sleep");
        }
    }
    for (std::uint16_t sid : received) {
        close_session(sid, now_us, false);
    }
    std::vector<int> entries;
    for (const auto& [entry, owned] : owned_) {
        entries.push_back(entry);
    }
    for (int entry : entries) {
        release_owned(entry, TsaEvent::RELEASE, now_us);
    }
    pending_searches_.clear();
    pending_responses_.clear();
    neighbors_.clear();
    observations_.clear();
}

void MacNode::wake(std::int64_t now_us)
{
    if (!sleeping_) {
        return;
    }
    sleeping_ = false;
    trace(now_us, "wake", {});
}

// --- timeline driver ---

std::optional<Transmission> MacNode::on_slot_boundary(const SlotRef& slot,
                                                      std::int64_t now_us)
{
    if (sleeping_) {
        return std::nullopt;
    }
    in_tx_slot_ = false;
    check_deadlines(now_us);
    collect_garbage(now_us);
    run_pending_searches(now_us);

    std::optional<MacPdu> pdu;
    if (slot.kind == SlotKind::MGMT) {
        if (slot.slot_id_in_cycle == params_.mgmt_slot) {
            promote_ready_slots(now_us);
            pdu = build_mgmt_pdu(slot, now_us);
        }
    } else {
        const int entry = bitmap_entry(slot.kind, slot.slot_id_in_cycle);
        const auto it = owned_.find(entry);
        if (it != owned_.end()) {
            pdu = build_data_pdu(slot, it->second, now_us);
        }
    }
    if (!pdu) {
        return std::nullopt;
    }

    Transmission tx;
    tx.node = params_.node_index;
    tx.slot = slot;
    tx.bits = encode(*pdu, cfg_);
    tx.pdu = std::move(*pdu);
    in_tx_slot_ = true;
    return tx;
}

MacPdu MacNode::build_mgmt_pdu(const SlotRef& slot, std::int64_t now_us)
{
    MacPdu pdu;
    pdu.header.fc.type = PduType::MGMT;
    pdu.header.fc.subtype = kMgmtSubtypeBeacon;
    pdu.header.fc.cycle_type = CycleType::MGMT;
    pdu.header.fc.frame_index = static_cast<std::uint8_t>(slot.frame_index);
    pdu.header.fc.slot_id_in_cycle = static_cast<std::uint16_t>(slot.slot_id_in_cycle);
    pdu.header.fc.slot_id_in_frame = static_cast<std::uint16_t>(slot.slot_id_in_frame);
    pdu.header.transmitter = params_.address;
    pdu.header.receiver = kBroadcastAddress;
    pdu.header.sequence = next_sequence();

    MgmtBody body;
    body.bitmap = own_view(now_us);
    if (!pending_responses_.empty() && cfg_.mgmt_padded_bits >= 16) {
        const PendingResponse res = pending_responses_.front();
        pending_responses_.pop_front();
        pdu.header.fc.subtype = kMgmtSubtypePttRes;
        body.piggyback = PttResBody{res.response, res.session_id};
        trace(now_us, "ptt_response_tx",
              {{"session", std::int64_t{res.session_id}},
               {"accept", std::int64_t{res.response ? 1 : 0}}});
    }
    pdu.body = std::move(body);

    // The claim is on the air with this PDU; use may start afterwards.
    for (auto& [entry, owned] : owned_) {
        if (owned.first_announced_us < 0) {
            owned.first_announced_us = slot.start_us;
            trace(now_us, "tsa_announce",
                  {{"entry", std::int64_t{entry}},
                   {"slot", std::int64_t{owned.slot_id_in_cycle}},
                   {"slot_kind", std::string(to_string(owned.kind))}});
        }
    }
    return pdu;
}

std::optional<MacPdu> MacNode::build_data_pdu(const SlotRef& slot, OwnedSlot& owned,
                                              std::int64_t now_us)
{
    // Never transmit a claim that has not been announced in a MGMT PDU yet.
    if (owned.first_announced_us < 0 || slot.start_us < owned.first_announced_us) {
        return std::nullopt;
    }
    if (owned.session_id == 0) {
        return std::nullopt;
    }
    const auto session_it = sessions_.find(owned.session_id);
    if (session_it == sessions_.end()) {
        return std::nullopt;
    }
    PttSessionState& session = session_it->second;

    MacPdu pdu;
    pdu.header.fc.cycle_type = slot.kind == SlotKind::RT ? CycleType::RT : CycleType::BE;
    pdu.header.fc.frame_index = static_cast<std::uint8_t>(slot.frame_index);
    pdu.header.fc.slot_id_in_cycle = static_cast<std::uint16_t>(slot.slot_id_in_cycle);
    pdu.header.fc.slot_id_in_frame = static_cast<std::uint16_t>(slot.slot_id_in_frame);
    pdu.header.transmitter = params_.address;

    switch (session.phase) {
    case SessionPhase::REQUESTING: {
        pdu.header.fc.type = PduType::PTT_SIG;
        pdu.header.fc.subtype = kPttSubtypeRequest;
        pdu.header.receiver = session.peer;
        pdu.header.sequence = next_sequence();
        pdu.body = PttSigBody{
            PttRequestBody{session.session_id, session.codec, session.rate}};
        owned.use_started = true;
        session.last_activity_us = now_us;
        if (session.peer == kBroadcastAddress) {
            // Unconfirmed service: a broadcast call is up when the request
            // transmission completes.
            session.phase = SessionPhase::SPEECH;
            trace(now_us, "session_established",
                  {{"session", std::int64_t{session.session_id}},
                   {"t_effective_us", std::int64_t{slot.end_us}}});
            if (cb_.session_established) {
                cb_.session_established(session.session_id, slot.end_us);
            }
        } else {
            session.phase = SessionPhase::WAIT_RESPONSES;
            session.deadline_us = slot.end_us + cfg_.frame_length_us;
        }
        return pdu;
    }
    case SessionPhase::WAIT_RESPONSES:
        return std::nullopt; // listening for the piggybacked verdict
    case SessionPhase::SPEECH:
    case SessionPhase::RELEASING: {
        auto queue_it = voice_queues_.find(session.session_id);
        const bool have_voice = queue_it != voice_queues_.end() && !queue_it->second.empty();
        if (have_voice) {
            pdu.header.fc.type = PduType::RT_DATA;
            pdu.header.fc.subtype = kRtSubtypeMelpe;
            pdu.header.receiver = session.peer;
            pdu.header.sequence = next_sequence();
            RtDataBody body;
            std::vector<std::int64_t> generated;
            auto& queue = queue_it->second;
            const int n = std::min<int>(cfg_.rt_voice_frames_per_slot,
                                        static_cast<int>(queue.size()));
            for (int i = 0; i < n; ++i) {
                body.voice_frames.push_back(queue.front().payload);
                generated.push_back(queue.front().generated_us);
                queue.pop_front();
            }
            pdu.header.fc.encapsulated_sdus = static_cast<std::uint8_t>(n);
            pdu.body = std::move(body);
            owned.use_started = true;
            session.last_activity_us = now_us;
            if (cb_.voice_transmitted) {
                cb_.voice_transmitted(session.session_id, pdu.header.sequence, generated);
            }
            return pdu;
        }
        if (session.phase == SessionPhase::RELEASING) {
            // Queue drained: the release goes out and the slot is freed.
            pdu.header.fc.type = PduType::PTT_SIG;
            pdu.header.fc.subtype = kPttSubtypeRelease;
            pdu.header.receiver = session.peer;
            pdu.header.sequence = next_sequence();
            pdu.body = PttSigBody{PttReleaseBody{session.session_id}};
            const std::uint16_t sid = session.session_id;
            const int entry = bitmap_entry(slot.kind, slot.slot_id_in_cycle);
            close_session(sid, now_us, false);
            release_owned(entry, TsaEvent::RELEASE, now_us);
            return pdu;
        }
        return std::nullopt; // established but nothing queued: idle occurrence
    }
    case SessionPhase::CLOSED:
        return std::nullopt;
    }
    return std::nullopt;
}

// --- medium upcalls ---

void MacNode::on_receive(const BitString& bits, const SlotRef& slot, std::int64_t now_us)
{
    if (sleeping_) {
        return;
    }
    MacPdu pdu;
    try {
        pdu = decode(bits, cfg_, slot.kind);
    } catch (const CodecError&) {
        // A frame the channel delivered but the parser rejects carries no
        // usable information; it is dropped without observation.
        return;
    }

    if (slot.kind != SlotKind::MGMT) {
        const int entry = bitmap_entry(slot.kind, slot.slot_id_in_cycle);
        observations_[entry] = Observation{
            SlotUse::NEIGHBOUR_TRANSMITTING,
            now_us + kObservationTtlFrames * cfg_.frame_length_us};
        const auto owned_it = owned_.find(entry);
        if (owned_it != owned_.end()
            && !(owned_it->second.state == AllocState::IN_USE
                 && owned_it->second.use_started)) {
            // Someone else is using a slot this node is still allocating.
            handle_claim_conflict(entry, now_us);
        }
    }

    switch (pdu.header.fc.type) {
    case PduType::MGMT: on_mgmt_received(pdu, now_us); break;
    case PduType::PTT_SIG: on_ptt_sig_received(pdu, now_us); break;
    case PduType::RT_DATA: on_rt_data_received(pdu, now_us); break;
    case PduType::BE_DATA: break; // no best-effort service bound in this build
    }
}

void MacNode::on_collision_sensed(const SlotRef& slot, std::int64_t now_us)
{
    if (sleeping_ || slot.kind == SlotKind::MGMT) {
        return;
    }
    const int entry = bitmap_entry(slot.kind, slot.slot_id_in_cycle);
    observations_[entry] = Observation{
        SlotUse::COLLISION, now_us + kObservationTtlFrames * cfg_.frame_length_us};
    const auto owned_it = owned_.find(entry);
    if (owned_it != owned_.end()
        && !(owned_it->second.state == AllocState::IN_USE
             && owned_it->second.use_started)) {
        handle_claim_conflict(entry, now_us);
    }
}

void MacNode::on_mgmt_received(const MacPdu& pdu, std::int64_t now_us)
{
    const MgmtBody& body = std::get<MgmtBody>(pdu.body);
    neighbors_[pdu.header.transmitter] = NeighborView{body.bitmap, now_us};

    // Conflict evidence against own claims: a neighbour reporting a
    // collision on the slot, or a rival asserting the same claim.
    std::vector<int> conflicted;
    for (const auto& [entry, owned] : owned_) {
        if (entry >= static_cast<int>(body.bitmap.entries.size())) {
            continue;
        }
        const SlotUse seen = body.bitmap.entries[static_cast<std::size_t>(entry)];
        const bool rival_claim = seen == SlotUse::TRANSMITTING;
        const bool reported_collision = seen == SlotUse::COLLISION;
        // NEIGHBOUR_TRANSMITTING is the echo of this node's own use.
        if (!rival_claim && !reported_collision) {
            continue;
        }
        if (owned.state == AllocState::IN_USE && owned.use_started) {
            continue; // established use rides out stale reports
        }
        conflicted.push_back(entry);
    }
    for (int entry : conflicted) {
        if (owned_.count(entry)) {
            handle_claim_conflict(entry, now_us);
        }
    }

    if (const PttResBody* res = std::get_if<PttResBody>(&body.piggyback)) {
        const auto it = sessions_.find(res->session_id);
        if (it != sessions_.end() && it->second.role == SessionRole::INITIATOR
            && it->second.phase == SessionPhase::WAIT_RESPONSES) {
            PttSessionState& session = it->second;
            session.response_received = true;
            session.last_activity_us = now_us;
            if (res->response) {
                session.phase = SessionPhase::SPEECH;
                trace(now_us, "session_established",
                      {{"session", std::int64_t{session.session_id}},
                       {"t_effective_us", std::int64_t{now_us}}});
                if (cb_.session_established) {
                    cb_.session_established(session.session_id, now_us);
                }
            } else {
                fail_session(session, now_us, "rejected by peer");
            }
        }
    }
}

void MacNode::on_ptt_sig_received(const MacPdu& pdu, std::int64_t now_us)
{
    const PttSigBody& sig = std::get<PttSigBody>(pdu.body);
    if (const PttRequestBody* req = std::get_if<PttRequestBody>(&sig)) {
        const bool for_me = pdu.header.receiver == params_.address;
        const bool broadcast = pdu.header.receiver == kBroadcastAddress;
        if (!for_me && !broadcast) {
            return;
        }
        if (sessions_.count(req->session_id)) {
            sessions_[req->session_id].last_activity_us = now_us;
            return; // duplicate request for a session already known
        }
        const bool accept = static_cast<int>(sessions_.size()) < params_.max_sessions;
        if (accept) {
            PttSessionState session;
            session.session_id = req->session_id;
            session.role = SessionRole::RESPONDER;
            session.phase = SessionPhase::SPEECH;
            session.peer = pdu.header.transmitter;
            session.codec = req->codec;
            session.rate = req->rate;
            session.last_activity_us = now_us;
            sessions_[req->session_id] = session;
            trace(now_us, "session_joined",
                  {{"session", std::int64_t{req->session_id}},
                   {"from", pdu.header.transmitter}});
        }
        if (for_me) {
            if (cfg_.mgmt_padded_bits >= 16) {
                pending_responses_.push_back(PendingResponse{req->session_id, accept});
            } else {
                // This frame plan has no padding for the piggyback; the
                // request can only time out on the caller's side.
                trace(now_us, "ptt_response_unsendable",
                      {{"session", std::int64_t{req->session_id}}});
            }
        }
        return;
    }
    if (const PttReleaseBody* rel = std::get_if<PttReleaseBody>(&sig)) {
        const auto it = sessions_.find(rel->session_id);
        if (it != sessions_.end() && it->second.role == SessionRole::RESPONDER) {
            trace(now_us, "session_released_by_peer",
                  {{"session", std::int64_t{rel->session_id}}});
            close_session(rel->session_id, now_us, false);
        }
        return;
    }
    // Relay signalling is recognized but inert in this build.
}

void MacNode::on_rt_data_received(const MacPdu& pdu, std::int64_t now_us)
{
    // Overheard unicast voice feeds the slot observations (done by the
    // caller) but never the local delivery path.
    if (pdu.header.receiver != kBroadcastAddress
        && pdu.header.receiver != params_.address) {
        return;
    }
    const RtDataBody& body = std::get<RtDataBody>(pdu.body);
    const std::uint64_t tx = pdu.header.transmitter;

    // Per-transmitter duplicate suppression on the 12-bit sequence number.
    const auto last = last_seq_.find(tx);
    std::uint16_t session_for_tx = 0;
    for (const auto& [sid, session] : sessions_) {
        if (session.role == SessionRole::RESPONDER && session.peer == tx) {
            session_for_tx = sid;
            break;
        }
    }
    if (last != last_seq_.end() && last->second == pdu.header.sequence) {
        if (cb_.voice_filtered) {
            cb_.voice_filtered(session_for_tx, tx,
                               static_cast<int>(body.voice_frames.size()), now_us);
        }
        trace(now_us, "rx_dup",
              {{"from", tx}, {"seq", std::int64_t{pdu.header.sequence}}});
        return;
    }
    last_seq_[tx] = pdu.header.sequence;

    if (session_for_tx != 0) {
        sessions_[session_for_tx].last_activity_us = now_us;
    }
    // Missing session state (a request lost to a collision, a late joiner)
    // does not gate voice delivery; the stream is attributed by transmitter.
    if (cb_.voice_delivered) {
        cb_.voice_delivered(session_for_tx, tx, pdu.header.sequence,
                            static_cast<int>(body.voice_frames.size()), now_us);
    }
}

// --- allocation machinery ---

bool MacNode::select_slot(PendingSearch& search, std::int64_t now_us, bool is_reselect,
                          int old_entry)
{
    const SlotBitmap merged = merged_view(now_us);
    const int rt_cycle_slots = cfg_.rt_slots * cfg_.rt_cycle_frames;
    const int begin = search.kind == SlotKind::RT ? 0 : rt_cycle_slots;
    const int end = search.kind == SlotKind::RT
        ? rt_cycle_slots
        : rt_cycle_slots + cfg_.be_slots * cfg_.be_cycle_frames;

    std::vector<int> candidates;
    for (int entry = begin; entry < end; ++entry) {
        if (entry == old_entry || owned_.count(entry)) {
            continue;
        }
        if (merged.entries[static_cast<std::size_t>(entry)] == SlotUse::IDLE) {
            candidates.push_back(entry);
        }
    }
    if (candidates.empty()) {
        ++search.retries;
        search.not_before_us = now_us + cfg_.mgmt_cycle_us();
        trace(now_us, "tsa_backoff",
              {{"session", std::int64_t{search.session_id}},
               {"retries", std::int64_t{search.retries}}});
        return false;
    }

    const int entry = candidates[tsa_rng_.next_below(
        static_cast<std::uint32_t>(candidates.size()))];
    OwnedSlot owned;
    owned.kind = search.kind;
    owned.slot_id_in_cycle =
        search.kind == SlotKind::RT ? entry : entry - rt_cycle_slots;
    owned.state = AllocState::ALLOCATING;
    owned.session_id = search.session_id;
    owned_[entry] = owned;

    const auto session_it = sessions_.find(search.session_id);
    if (session_it != sessions_.end()) {
        session_it->second.rt_slot_entry = entry;
    }
    const char* kind = is_reselect ? "tsa_reselect" : "tsa_select";
    trace(now_us, kind,
          {{"entry", std::int64_t{entry}},
           {"slot", std::int64_t{owned.slot_id_in_cycle}},
           {"session", std::int64_t{search.session_id}},
           {"old_entry", std::int64_t{old_entry}}});
    if (cb_.tsa) {
        cb_.tsa(params_.node_index, is_reselect ? TsaEvent::RESELECT : TsaEvent::SELECT,
                search.kind, entry, old_entry);
    }
    return true;
}

void MacNode::run_pending_searches(std::int64_t now_us)
{
    std::vector<PendingSearch> keep;
    for (PendingSearch& search : pending_searches_) {
        if (!sessions_.count(search.session_id)) {
            continue; // session died while the search waited
        }
        if (now_us < search.not_before_us) {
            keep.push_back(search);
            continue;
        }
        if (select_slot(search, now_us, search.retries > 0 || search.was_conflict,
                        -1)) {
            continue;
        }
        if (search.retries > params_.tsa_retry_limit) {
            const auto it = sessions_.find(search.session_id);
            if (it != sessions_.end()) {
                fail_session(it->second, now_us, "no free slot");
            }
            continue;
        }
        keep.push_back(search);
    }
    pending_searches_ = std::move(keep);
}

void MacNode::handle_claim_conflict(int entry, std::int64_t now_us)
{
    const auto it = owned_.find(entry);
    if (it == owned_.end()) {
        return;
    }
    const OwnedSlot owned = it->second;
    trace(now_us, "tsa_conflict",
          {{"entry", std::int64_t{entry}},
           {"slot", std::int64_t{owned.slot_id_in_cycle}},
           {"session", std::int64_t{owned.session_id}}});
    if (cb_.tsa) {
        cb_.tsa(params_.node_index, TsaEvent::CONFLICT, owned.kind, entry, entry);
    }
    owned_.erase(it);

    const auto session_it = sessions_.find(owned.session_id);
    if (session_it != sessions_.end()) {
        session_it->second.rt_slot_entry.reset();
        // Immediate reselection; the conflicted slot is excluded even if the
        // merged view has not caught up yet.
        PendingSearch search{owned.kind, owned.session_id, 0, now_us};
        search.was_conflict = true;
        if (!select_slot(search, now_us, true, entry)) {
            pending_searches_.push_back(search);
        }
    }
}

void MacNode::promote_ready_slots(std::int64_t now_us)
{
    for (auto& [entry, owned] : owned_) {
        if (owned.state != AllocState::ALLOCATING || owned.first_announced_us < 0) {
            continue;
        }
        if (now_us - owned.first_announced_us < cfg_.mgmt_cycle_us()) {
            continue; // every neighbour must have had one report opportunity
        }
        owned.state = AllocState::IN_USE;
        trace(now_us, "tsa_confirm",
              {{"entry", std::int64_t{entry}},
               {"slot", std::int64_t{owned.slot_id_in_cycle}}});
        if (cb_.tsa) {
            cb_.tsa(params_.node_index, TsaEvent::CONFIRM, owned.kind, entry, -1);
        }
    }
}

void MacNode::check_deadlines(std::int64_t now_us)
{
    std::vector<std::uint16_t> expired;
    for (auto& [sid, session] : sessions_) {
        if (session.role == SessionRole::INITIATOR
            && session.phase == SessionPhase::WAIT_RESPONSES
            && session.deadline_us >= 0 && now_us >= session.deadline_us
            && !session.response_received) {
            expired.push_back(sid);
        }
    }
    for (std::uint16_t sid : expired) {
        const auto it = sessions_.find(sid);
        if (it != sessions_.end()) {
            fail_session(it->second, now_us, "no response");
        }
    }
}

void MacNode::collect_garbage(std::int64_t now_us)
{
    std::vector<std::uint16_t> stale;
    for (const auto& [sid, session] : sessions_) {
        if (session.role == SessionRole::RESPONDER
            && now_us - session.last_activity_us
                > kReceiverGcFrames * cfg_.frame_length_us) {
            stale.push_back(sid);
        }
    }
    for (std::uint16_t sid : stale) {
        trace(now_us, "session_gc", {{"session", std::int64_t{sid}}});
        close_session(sid, now_us, false);
    }
}

void MacNode::release_owned(int entry, TsaEvent reason, std::int64_t now_us)
{
    const auto it = owned_.find(entry);
    if (it == owned_.end()) {
        return;
    }
    trace(now_us, "tsa_release",
          {{"entry", std::int64_t{entry}},
           {"slot", std::int64_t{it->second.slot_id_in_cycle}}});
    if (cb_.tsa) {
        cb_.tsa(params_.node_index, reason, it->second.kind, entry, entry);
    }
    owned_.erase(it);
}

void MacNode::close_session(std::uint16_t session_id, std::int64_t now_us,
                            bool flush_queue)
{
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        return;
    }
    const auto queue_it = voice_queues_.find(session_id);
    if (queue_it != voice_queues_.end()) {
        const int remaining = static_cast<int>(queue_it->second.size());
        if (remaining > 0 && flush_queue) {
            trace(now_us, "voice_drop",
                  {{"session", std::int64_t{session_id}},
                   {"count", std::int64_t{remaining}}});
            if (cb_.voice_dropped) {
                cb_.voice_dropped(session_id, remaining, now_us);
            }
        }
        voice_queues_.erase(queue_it);
    }
    sessions_.erase(it);
    trace(now_us, "session_closed", {{"session", std::int64_t{session_id}}});
    if (cb_.session_closed) {
        cb_.session_closed(session_id, now_us);
    }
}

void MacNode::fail_session(PttSessionState& session, std::int64_t now_us,
                           const std::string& reason)
{
    const std::uint16_t sid = session.session_id;
    const std::optional<int> entry = session.rt_slot_entry;
    trace(now_us, "session_failed",
          {{"session", std::int64_t{sid}}, {"reason", reason}});

    const auto queue_it = voice_queues_.find(sid);
    if (queue_it != voice_queues_.end()) {
        const int remaining = static_cast<int>(queue_it->second.size());
        if (remaining > 0) {
            trace(now_us, "voice_drop",
                  {{"session", std::int64_t{sid}}, {"count", std::int64_t{remaining}}});
            if (cb_.voice_dropped) {
                cb_.voice_dropped(sid, remaining, now_us);
            }
        }
        voice_queues_.erase(queue_it);
    }
    sessions_.erase(sid);
    if (entry) {
        release_owned(*entry, TsaEvent::RELEASE, now_us);
    }
    if (cb_.session_failed) {
        cb_.session_failed(sid, now_us, reason);
    }
}

} // namespace wbwf
