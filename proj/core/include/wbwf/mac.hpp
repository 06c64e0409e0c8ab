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
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "wbwf/codec.hpp"
#include "wbwf/pdu.hpp"
#include "wbwf/planner.hpp"
#include "wbwf/rng.hpp"
#include "wbwf/trace.hpp"

namespace wbwf {

/** One concrete slot occurrence on the shared timeline. */
struct SlotRef {
    SlotKind kind = SlotKind::MGMT;
    int slot_id_in_frame = 0;
    int slot_id_in_cycle = 0;
    int frame_index = 0;            // frame within the kind's cycle
    std::uint64_t frame_number = 0; // absolute atomic frame count
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
};

/** A PDU handed to the medium for one slot occurrence. */
struct Transmission {
    int node = -1;
    SlotRef slot;
    MacPdu pdu;
    BitString bits;
};

enum class MainState { IDLE, TX, RX, SLEEP, SEARCH_RT, SEARCH_BE, SEARCH_BOTH };

enum class AllocState { ALLOCATING, IN_USE };

enum class SessionPhase { REQUESTING, WAIT_RESPONSES, SPEECH, RELEASING, CLOSED };

enum class SessionRole { INITIATOR, RESPONDER };

enum class TsaEvent { SELECT, CONFLICT, RESELECT, CONFIRM, RELEASE };

const char* to_string(MainState state);
const char* to_string(SessionPhase phase);

/** A data slot the node has claimed, keyed by its bitmap entry index. */
struct OwnedSlot {
    SlotKind kind = SlotKind::RT;
    int slot_id_in_cycle = 0;
    AllocState state = AllocState::ALLOCATING;
    std::int64_t first_announced_us = -1; // -1 until the claim went out in a MGMT PDU
    bool use_started = false;
    std::uint16_t session_id = 0; // owning PTT session, 0 when none
};

struct PttSessionState {
    std::uint16_t session_id = 0;
    SessionRole role = SessionRole::INITIATOR;
    SessionPhase phase = SessionPhase::REQUESTING;
    std::uint64_t peer = 0; // destination for initiators, transmitter for responders
    std::uint8_t codec = 0;
    std::uint8_t rate = 0;
    std::optional<int> rt_slot_entry; // bitmap entry index of the session's RT slot
    bool response_received = false;
    std::int64_t deadline_us = -1; // response deadline while WAIT_RESPONSES
    std::int64_t last_activity_us = 0;
};

/**
 * Engine upcalls. All callbacks are optional except trace; times are the
 * simulation timestamps the state change takes effect at (a transmission
 * completes at its slot end).
 */
struct MacCallbacks {
    std::function<void(const TraceEvent&)> trace;
    std::function<void(int node, TsaEvent event, SlotKind kind, int slot_entry, int old_entry)>
        tsa;
    std::function<void(std::uint16_t session, std::int64_t t_us)> session_established;
    std::function<void(std::uint16_t session, std::int64_t t_us, const std::string& reason)>
        session_failed;
    std::function<void(std::uint16_t session, std::int64_t t_us)> session_closed;
    /** Initiator side: queued frames leaving in one RT-DATA PDU. */
    std::function<void(std::uint16_t session, std::uint16_t sequence,
                       const std::vector<std::int64_t>& generated_us)>
        voice_transmitted;
    /** Receiver side: frames accepted from the session peer. */
    std::function<void(std::uint16_t session, std::uint64_t transmitter, std::uint16_t sequence,
                       int count, std::int64_t t_us)>
        voice_delivered;
    /** Receiver side: duplicate-suppressed frames (repeated sequence number). */
    std::function<void(std::uint16_t session, std::uint64_t transmitter, int count,
                       std::int64_t t_us)>
        voice_filtered;
    /** Frames flushed without transmission (session teardown). */
    std::function<void(std::uint16_t session, int count, std::int64_t t_us)> voice_dropped;
};

/**
 * Per-node MAC protocol machine: fixed MGMT beaconing, usage-bitmap fusion
 * with hidden-node detection, unconfirmed slot allocation with collision
 * recovery, and the three-phase PTT session FSM.
 *
 * The engine is driven from outside: the event loop calls on_slot_boundary
 * for every slot, the medium feeds received frames and sensed collisions,
 * and the traffic layer calls the service primitives. No internal timers.
 */
class MacNode {
public:
    struct Params {
        int node_index = 0;
        std::uint64_t address = 0;
        int mgmt_slot = 0;        // slot id within the MGMT cycle, fixed assignment
        int max_sessions = 4;     // concurrent session records per node
        int tsa_retry_limit = 8;  // backoff rounds before a search fails
    };

    MacNode(Params params, const TdmaConfig& cfg, SplitMix64 tsa_rng, MacCallbacks callbacks);

    // --- service primitives (traffic layer) ---

    /**
     * Opens a PTT session toward destination (broadcast or unicast) and
     * starts the RT slot search. Returns the globally unique session id
     * (mgmt_slot * 64 + a per-node counter cycling 1..63; id 0 is reserved
     * for "session unknown"). Throws SessionLimitReached.
     */
    std::uint16_t ptt_request(std::uint64_t destination, std::uint8_t codec, std::uint8_t rate,
                              std::int64_t now_us);

    /**
     * Ends the speech phase: remaining queued frames drain over the next RT
     * slot occurrences, then a release PDU goes out and all resources are
     * freed. Throws UnknownSession.
     */
    void ptt_release(std::uint16_t session_id, std::int64_t now_us);

    /** Queues one 54-bit coded voice frame on a SPEECH session. */
    void enqueue_voice(std::uint16_t session_id, std::uint64_t payload, std::int64_t now_us);

    // --- scenario scripting ---

    void enter_sleep(std::int64_t now_us);
    void wake(std::int64_t now_us);

    // --- timeline driver ---

    /**
     * Reacts to a slot start: the node's own MGMT slot produces the periodic
     * bitmap PDU, an owned announced data slot produces signalling or data,
     * anything else means listening. At most one transmission per slot.
     */
    std::optional<Transmission> on_slot_boundary(const SlotRef& slot, std::int64_t now_us);

    // --- medium upcalls ---

    /** A frame that survived the channel; now_us is the slot end. */
    void on_receive(const BitString& bits, const SlotRef& slot, std::int64_t now_us);

    /** Undecodable overlapping energy sensed in a data slot. */
    void on_collision_sensed(const SlotRef& slot, std::int64_t now_us);

    // --- inspection ---

    int node_index() const { return params_.node_index; }
    std::uint64_t address() const { return params_.address; }
    int mgmt_slot() const { return params_.mgmt_slot; }
    bool asleep() const { return sleeping_; }
    MainState main_state() const;

    /** The bitmap the node would emit right now (local knowledge only). */
    SlotBitmap own_view(std::int64_t now_us) const;

    /** Own view fused with fresh neighbour reports (slot-search input). */
    SlotBitmap merged_view(std::int64_t now_us) const;

    const std::map<int, OwnedSlot>& owned_slots() const { return owned_; }
    const std::map<std::uint16_t, PttSessionState>& sessions() const { return sessions_; }
    std::size_t voice_queue_length(std::uint16_t session_id) const;

    /** Bitmap entry index of a data slot (RT entries first, then BE). */
    int bitmap_entry(SlotKind kind, int slot_id_in_cycle) const;

private:
    struct QueuedVoice {
        std::uint64_t payload;
        std::int64_t generated_us;
    };

    struct NeighborView {
        SlotBitmap bitmap;
        std::int64_t heard_us;
    };

    struct Observation {
        SlotUse code;
        std::int64_t expires_us;
    };

    struct PendingResponse {
        std::uint16_t session_id;
        bool response;
    };

    struct PendingSearch {
        SlotKind kind;
        std::uint16_t session_id;
        int retries = 0;
        std::int64_t not_before_us = 0;
        bool was_conflict = false; // search restarted after a claim conflict
    };

    MacPdu build_mgmt_pdu(const SlotRef& slot, std::int64_t now_us);
    std::optional<MacPdu> build_data_pdu(const SlotRef& slot, OwnedSlot& owned,
                                         std::int64_t now_us);
    void on_mgmt_received(const MacPdu& pdu, std::int64_t now_us);
    void on_ptt_sig_received(const MacPdu& pdu, std::int64_t now_us);
    void on_rt_data_received(const MacPdu& pdu, std::int64_t now_us);
    bool select_slot(PendingSearch& search, std::int64_t now_us, bool is_reselect,
                     int old_entry);
    void run_pending_searches(std::int64_t now_us);
    void handle_claim_conflict(int entry, std::int64_t now_us);
    void promote_ready_slots(std::int64_t now_us);
    void check_deadlines(std::int64_t now_us);
    void collect_garbage(std::int64_t now_us);
    void release_owned(int entry, TsaEvent reason, std::int64_t now_us);
    void close_session(std::uint16_t session_id, std::int64_t now_us, bool flush_queue);
    void fail_session(PttSessionState& session, std::int64_t now_us, const std::string& reason);
    std::uint16_t next_sequence();
    void trace(std::int64_t t_us, const char* kind, std::vector<TraceField> fields) const;

    Params params_;
    TdmaConfig cfg_;
    SplitMix64 tsa_rng_;
    MacCallbacks cb_;

    bool sleeping_ = false;
    bool in_tx_slot_ = false;
    std::uint16_t sequence_counter_ = 0;
    std::uint8_t session_counter_ = 0;

    std::map<int, OwnedSlot> owned_;                    // keyed by bitmap entry
    std::map<int, Observation> observations_;           // keyed by bitmap entry
    std::map<std::uint64_t, NeighborView> neighbors_;   // keyed by address
    std::map<std::uint64_t, std::uint16_t> last_seq_;   // duplicate filter
    std::map<std::uint16_t, PttSessionState> sessions_; // keyed by session id
    std::map<std::uint16_t, std::deque<QueuedVoice>> voice_queues_;
    std::deque<PendingResponse> pending_responses_;
    std::vector<PendingSearch> pending_searches_;
};

} // namespace wbwf
