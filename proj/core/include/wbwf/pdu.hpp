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
#include <variant>
#include <vector>

#include "wbwf/bits.hpp"
#include "wbwf/planner.hpp"

namespace wbwf {

enum class PduType : std::uint8_t { MGMT = 0, RT_DATA = 1, BE_DATA = 2, PTT_SIG = 3 };
enum class CycleType : std::uint8_t { MGMT = 0, RT = 1, BE = 2 };

/** Per-slot usage code carried in the MGMT bitmap, two bits each. */
enum class SlotUse : std::uint8_t {
    IDLE = 0,
    TRANSMITTING = 1,
    NEIGHBOUR_TRANSMITTING = 2,
    COLLISION = 3,
};

// Subtype code points, per PDU type.
inline constexpr std::uint8_t kMgmtSubtypeBeacon = 0;
inline constexpr std::uint8_t kMgmtSubtypePttRes = 1;
inline constexpr std::uint8_t kMgmtSubtypeQll = 2;
inline constexpr std::uint8_t kPttSubtypeRequest = 0;
inline constexpr std::uint8_t kPttSubtypeRelease = 1;
inline constexpr std::uint8_t kPttSubtypeRelay = 2;
inline constexpr std::uint8_t kRtSubtypeMelpe = 0; // codec family; rate travels in the request body

inline constexpr std::uint64_t kBroadcastAddress = 0xFFFFFFFFFFFFull;
inline constexpr int kVoiceFrameBits = 54;

// Voice coding rate code points for the PTT request body.
inline constexpr std::uint8_t kRate2400 = 0;
inline constexpr std::uint8_t kRate1200 = 1;
inline constexpr std::uint8_t kRate600 = 2;

/**
 * The modified Frame Control word, 32 bits on the wire:
 * type(2) subtype(3) more_fragment(1) cycle_type(2) frame_index(3)
 * slot_id_in_cycle(9) slot_id_in_frame(9) encapsulated_sdus(3).
 */
struct FrameControl {
    PduType type = PduType::MGMT;
    std::uint8_t subtype = 0;
    bool more_fragment = false;
    CycleType cycle_type = CycleType::MGMT;
    std::uint8_t frame_index = 0;       // frame within the slot's cycle, 0..7
    std::uint16_t slot_id_in_cycle = 0; // 0..511
    std::uint16_t slot_id_in_frame = 0; // 0..511, dense across the atomic frame
    std::uint8_t encapsulated_sdus = 0; // voice frames in an RT-DATA PDU

    bool operator==(const FrameControl&) const = default;
};

/**
 * 176-bit MAC header: FrameControl, two 6-octet addresses, 16-bit sequence
 * control, and the 32-bit FCS (serialized at the end of the frame).
 */
struct MacHeader {
    FrameControl fc;
    std::uint64_t transmitter = 0; // 48-bit
    std::uint64_t receiver = 0;    // 48-bit; all-ones is broadcast
    std::uint16_t sequence = 0;    // 12-bit rolling
    std::uint8_t fragment = 0;     // 4-bit; carried, never set by this artifact
    std::uint32_t fcs = 0;         // derived; filled in by encode/decode

    // fcs is a checksum over the rest, so it does not take part in equality.
    friend bool operator==(const MacHeader& a, const MacHeader& b)
    {
        return a.fc == b.fc && a.transmitter == b.transmitter && a.receiver == b.receiver
            && a.sequence == b.sequence && a.fragment == b.fragment;
    }
};

/**
 * Local usage view of every data slot in the data cycles: RT cycle slots
 * first, then BE cycle slots, slot id ascending.
 */
struct SlotBitmap {
    std::vector<SlotUse> entries;

    bool operator==(const SlotBitmap&) const = default;

    static SlotBitmap idle(int n) { return SlotBitmap{std::vector<SlotUse>(n, SlotUse::IDLE)}; }
};

struct BeaconBody {
    bool operator==(const BeaconBody&) const = default;
};

/** PTT response piggyback: 16 bits of the MGMT padding, MSB is the verdict. */
struct PttResBody {
    bool response = false; // true accepts the session
    std::uint16_t session_id = 0;

    bool operator==(const PttResBody&) const = default;
};

/** Queue Load Level piggyback; its coding is unspecified, so it stays opaque. */
struct QllBody {
    BitString opaque; // exactly the padding region

    bool operator==(const QllBody&) const = default;
};

struct MgmtBody {
    SlotBitmap bitmap;
    std::variant<BeaconBody, PttResBody, QllBody> piggyback;

    bool operator==(const MgmtBody&) const = default;
};

struct PttRequestBody {
    std::uint16_t session_id = 0; // 15-bit
    std::uint8_t codec = 0;       // 4-bit, 0 is the 2400 bps vocoder family
    std::uint8_t rate = 0;        // 3-bit rate code

    bool operator==(const PttRequestBody&) const = default;
};

struct PttReleaseBody {
    std::uint16_t session_id = 0;

    bool operator==(const PttReleaseBody&) const = default;
};

/** Session relay is recognized on the wire but carries no defined payload. */
struct PttRelayBody {
    bool operator==(const PttRelayBody&) const = default;
};

using PttSigBody = std::variant<PttRequestBody, PttReleaseBody, PttRelayBody>;

struct RtDataBody {
    std::vector<std::uint64_t> voice_frames; // 54-bit coded frames

    bool operator==(const RtDataBody&) const = default;
};

struct BeDataBody {
    std::vector<std::uint8_t> payload;

    bool operator==(const BeDataBody&) const = default;
};

using PduBody = std::variant<MgmtBody, PttSigBody, RtDataBody, BeDataBody>;

struct MacPdu {
    MacHeader header;
    PduBody body;

    bool operator==(const MacPdu&) const = default;
};

/** The slot kind a PDU type is transmitted in (PTT signalling rides RT slots). */
SlotKind slot_kind_for(PduType type);

const char* to_string(PduType type);
const char* to_string(CycleType type);

} // namespace wbwf
