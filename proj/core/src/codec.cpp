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

#include "wbwf/codec.hpp"

#include <string>

#include "wbwf/errors.hpp"

namespace wbwf {

SlotKind slot_kind_for(PduType type)
{
    switch (type) {
    case PduType::MGMT: return SlotKind::MGMT;
    case PduType::RT_DATA: return SlotKind::RT;
    case PduType::PTT_SIG: return SlotKind::RT; // call signalling rides RT slots
    case PduType::BE_DATA: return SlotKind::BE;
    }
    return SlotKind::MGMT;
}

const char* to_string(PduType type)
{
    switch (type) {
    case PduType::MGMT: return "MGMT";
    case PduType::RT_DATA: return "RT_DATA";
    case PduType::BE_DATA: return "BE_DATA";
    case PduType::PTT_SIG: return "PTT_SIG";
    }
    return "?";
}

const char* to_string(CycleType type)
{
    switch (type) {
    case CycleType::MGMT: return "MGMT";
    case CycleType::RT: return "RT";
    case CycleType::BE: return "BE";
    }
    return "?";
}

std::uint32_t fcs32(const BitString& bits, std::size_t first_bit, std::size_t nbits)
{
    if (nbits == SIZE_MAX) {
        nbits = bits.nbits - first_bit;
    }
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = first_bit; i < first_bit + nbits; ++i) {
        const std::uint32_t in = static_cast<std::uint32_t>(bits.bit(i));
        crc = (crc >> 1) ^ (((crc ^ in) & 1u) ? 0xEDB88320u : 0u);
    }
    return crc ^ 0xFFFFFFFFu;
}

namespace {

constexpr int kHeaderBits = 144; // without the trailing FCS
constexpr int kFcsBits = 32;

int capacity_bits(const TdmaConfig& cfg, SlotKind kind)
{
    return cfg.slot_data_bits(kind);
}

CycleType cycle_for(SlotKind kind)
{
    switch (kind) {
    case SlotKind::MGMT: return CycleType::MGMT;
    case SlotKind::RT: return CycleType::RT;
    case SlotKind::BE: return CycleType::BE;
    }
    return CycleType::MGMT;
}

void require(bool ok, const char* field, const std::string& detail)
{
    if (!ok) {
        throw InvalidPdu(field, detail);
    }
}

void check_header(const MacPdu& pdu, const TdmaConfig& cfg)
{
    const FrameControl& fc = pdu.header.fc;
    const SlotKind kind = slot_kind_for(fc.type);

    switch (fc.type) {
    case PduType::MGMT:
        require(fc.subtype <= kMgmtSubtypeQll, "subtype", "MGMT subtype out of range");
        break;
    case PduType::RT_DATA:
        require(fc.subtype == kRtSubtypeMelpe, "subtype", "unknown RT-DATA codec family");
        break;
    case PduType::BE_DATA:
        require(fc.subtype == 0, "subtype", "BE-DATA defines no subtypes");
        break;
    case PduType::PTT_SIG:
        require(fc.subtype <= kPttSubtypeRelay, "subtype", "PTT subtype out of range");
        break;
    }

    require(fc.cycle_type == cycle_for(kind), "cycle_type",
            "cycle type must match the slot kind of the PDU type");
    require(fc.frame_index < cfg.cycle_frames(kind), "frame_index",
            "frame index beyond the cycle length");

    const int base = cfg.region_base(kind);
    const int in_frame = fc.slot_id_in_frame;
    require(in_frame >= base && in_frame < base + cfg.slots_in_frame(kind),
            "slot_id_in_frame", "slot id outside the region of its kind");
    const int expected_in_cycle =
        fc.frame_index * cfg.slots_in_frame(kind) + (in_frame - base);
    require(fc.slot_id_in_cycle == expected_in_cycle, "slot_id_in_cycle",
            "cycle slot id inconsistent with frame index and frame slot id");

    if (fc.type == PduType::RT_DATA) {
        require(fc.encapsulated_sdus >= 1
                    && fc.encapsulated_sdus <= cfg.rt_voice_frames_per_slot,
                "encapsulated_sdus", "RT-DATA carries 1..v voice frames");
    } else {
        require(fc.encapsulated_sdus == 0, "encapsulated_sdus",
                "only RT-DATA encapsulates SDUs");
    }

    require(pdu.header.transmitter <= kBroadcastAddress, "transmitter",
            "addresses are 48-bit");
    require(pdu.header.receiver <= kBroadcastAddress, "receiver", "addresses are 48-bit");
    require(pdu.header.sequence < (1u << 12), "sequence", "sequence number is 12-bit");
    require(pdu.header.fragment < (1u << 4), "fragment", "fragment number is 4-bit");
}

void write_header(BitWriter& w, const MacHeader& h)
{
    w.put(static_cast<std::uint64_t>(h.fc.type), 2);
    w.put(h.fc.subtype, 3);
    w.put(h.fc.more_fragment ? 1 : 0, 1);
    w.put(static_cast<std::uint64_t>(h.fc.cycle_type), 2);
    w.put(h.fc.frame_index, 3);
    w.put(h.fc.slot_id_in_cycle, 9);
    w.put(h.fc.slot_id_in_frame, 9);
    w.put(h.fc.encapsulated_sdus, 3);
    w.put(h.transmitter, 48);
    w.put(h.receiver, 48);
    w.put(h.sequence, 12);
    w.put(h.fragment, 4);
}

void write_zeros(BitWriter& w, int nbits)
{
    while (nbits > 0) {
        const int chunk = nbits < 32 ? nbits : 32;
        w.put(0, chunk);
        nbits -= chunk;
    }
}

void write_mgmt_body(BitWriter& w, const MacPdu& pdu, const TdmaConfig& cfg)
{
    const MgmtBody* body = std::get_if<MgmtBody>(&pdu.body);
    require(body != nullptr, "body", "MGMT PDU needs an MGMT body");
    const int n = cfg.data_slots_per_cycle();
    require(static_cast<int>(body->bitmap.entries.size()) == n, "bitmap",
            "bitmap must cover every data slot in the data cycles");
    for (SlotUse use : body->bitmap.entries) {
        w.put(static_cast<std::uint64_t>(use), 2);
    }

    int pad = capacity_bits(cfg, SlotKind::MGMT) - kFcsBits - static_cast<int>(w.bit_size());
    switch (pdu.header.fc.subtype) {
    case kMgmtSubtypeBeacon:
        require(std::holds_alternative<BeaconBody>(body->piggyback), "piggyback",
                "beacon subtype carries no piggyback");
        break;
    case kMgmtSubtypePttRes: {
        const PttResBody* res = std::get_if<PttResBody>(&body->piggyback);
        require(res != nullptr, "piggyback", "PTT response subtype needs its piggyback");
        require(pad >= 16, "piggyback",
                "this configuration has no room for the 16-bit PTT response");
        require(res->session_id < (1u << 15), "session_id", "session ids are 15-bit");
        w.put(res->response ? 1 : 0, 1);
        w.put(res->session_id, 15);
        pad -= 16;
        break;
    }
    case kMgmtSubtypeQll: {
        const QllBody* qll = std::get_if<QllBody>(&body->piggyback);
        require(qll != nullptr, "piggyback", "QLL subtype needs its opaque piggyback");
        require(static_cast<int>(qll->opaque.nbits) == pad, "piggyback",
                "QLL piggyback must fill the padding region exactly");
        for (std::size_t i = 0; i < qll->opaque.nbits; ++i) {
            w.put(static_cast<std::uint64_t>(qll->opaque.bit(i)), 1);
        }
        pad = 0;
        break;
    }
    default:
        break; // unreachable, header check rejects other subtypes
    }
    write_zeros(w, pad);
}

void write_rt_body(BitWriter& w, const MacPdu& pdu, const TdmaConfig& cfg)
{
    const RtDataBody* body = std::get_if<RtDataBody>(&pdu.body);
    require(body != nullptr, "body", "RT-DATA PDU needs a voice body");
    require(body->voice_frames.size() == pdu.header.fc.encapsulated_sdus,
            "encapsulated_sdus", "header count must match the voice frames carried");
    for (std::uint64_t frame : body->voice_frames) {
        require(frame < (1ull << kVoiceFrameBits), "voice_frames",
                "voice frames are 54-bit");
        w.put(frame, kVoiceFrameBits);
    }
    write_zeros(w, capacity_bits(cfg, SlotKind::RT) - kFcsBits
                       - static_cast<int>(w.bit_size()));
}

void write_be_body(BitWriter& w, const MacPdu& pdu, const TdmaConfig& cfg)
{
    const BeDataBody* body = std::get_if<BeDataBody>(&pdu.body);
    require(body != nullptr, "body", "BE-DATA PDU needs a datagram body");
    require(static_cast<int>(body->payload.size()) == cfg.be_payload_bytes, "payload",
            "BE datagrams are fixed-size segments of be_payload_bytes");
    for (std::uint8_t byte : body->payload) {
        w.put(byte, 8);
    }
    write_zeros(w, capacity_bits(cfg, SlotKind::BE) - kFcsBits
                       - static_cast<int>(w.bit_size()));
}

void write_ptt_body(BitWriter& w, const MacPdu& pdu, const TdmaConfig& cfg)
{
    const PttSigBody* sig = std::get_if<PttSigBody>(&pdu.body);
    require(sig != nullptr, "body", "PTT signalling PDU needs a signalling body");
    switch (pdu.header.fc.subtype) {
    case kPttSubtypeRequest: {
        const PttRequestBody* req = std::get_if<PttRequestBody>(sig);
        require(req != nullptr, "body", "request subtype needs a request body");
        require(req->session_id < (1u << 15), "session_id", "session ids are 15-bit");
        require(req->codec < (1u << 4), "codec", "codec field is 4-bit");
        require(req->rate < (1u << 3), "rate", "rate field is 3-bit");
        w.put(req->session_id, 15);
        w.put(req->codec, 4);
        w.put(req->rate, 3);
        w.put(0, 2); // request body is padded to 24 bits
        break;
    }
    case kPttSubtypeRelease: {
        const PttReleaseBody* rel = std::get_if<PttReleaseBody>(sig);
        require(rel != nullptr, "body", "release subtype needs a release body");
        require(rel->session_id < (1u << 15), "session_id", "session ids are 15-bit");
        w.put(rel->session_id, 15);
        w.put(0, 1); // release body is padded to 16 bits
        break;
    }
    case kPttSubtypeRelay:
        require(std::holds_alternative<PttRelayBody>(*sig), "body",
                "relay subtype carries no payload");
        break;
    default:
        break; // unreachable, header check rejects other subtypes
    }
    write_zeros(w, capacity_bits(cfg, SlotKind::RT) - kFcsBits
                       - static_cast<int>(w.bit_size()));
}

} // namespace

BitString encode(const MacPdu& pdu, const TdmaConfig& cfg)
{
    check_header(pdu, cfg);

    BitWriter w;
    write_header(w, pdu.header);
    switch (pdu.header.fc.type) {
    case PduType::MGMT: write_mgmt_body(w, pdu, cfg); break;
    case PduType::RT_DATA: write_rt_body(w, pdu, cfg); break;
    case PduType::BE_DATA: write_be_body(w, pdu, cfg); break;
    case PduType::PTT_SIG: write_ptt_body(w, pdu, cfg); break;
    }

    const BitString body = w.take();
    const std::uint32_t crc = fcs32(body);
    BitWriter full;
    BitReader r(body);
    std::size_t left = body.nbits;
    while (left >= 32) {
        full.put(r.get(32), 32);
        left -= 32;
    }
    if (left > 0) {
        full.put(r.get(static_cast<int>(left)), static_cast<int>(left));
    }
    full.put(crc, kFcsBits);
    return full.take();
}

namespace {

void malformed(bool ok, const char* field, const std::string& detail)
{
    if (!ok) {
        throw MalformedField(field, detail);
    }
}

} // namespace

MacPdu decode(const BitString& bits, const TdmaConfig& cfg, SlotKind expected_kind)
{
    const std::size_t expected_bits =
        static_cast<std::size_t>(capacity_bits(cfg, expected_kind));
    if (bits.nbits != expected_bits) {
        throw LengthMismatch(expected_bits, bits.nbits);
    }

    // Integrity first: no field is interpreted off a frame that fails its FCS.
    const std::uint32_t computed = fcs32(bits, 0, bits.nbits - kFcsBits);
    BitReader tail(bits);
    { // position the tail reader on the FCS field
        std::size_t skip = bits.nbits - kFcsBits;
        while (skip > 0) {
            const int chunk = skip < 32 ? static_cast<int>(skip) : 32;
            tail.get(chunk);
            skip -= static_cast<std::size_t>(chunk);
        }
    }
    const std::uint32_t received = static_cast<std::uint32_t>(tail.get(kFcsBits));
    if (computed != received) {
        throw FcsMismatch();
    }

    BitReader r(bits);
    MacPdu pdu;
    MacHeader& h = pdu.header;
    h.fc.type = static_cast<PduType>(r.get(2));
    h.fc.subtype = static_cast<std::uint8_t>(r.get(3));
    h.fc.more_fragment = r.get(1) != 0;
    const std::uint8_t cycle_raw = static_cast<std::uint8_t>(r.get(2));
    h.fc.frame_index = static_cast<std::uint8_t>(r.get(3));
    h.fc.slot_id_in_cycle = static_cast<std::uint16_t>(r.get(9));
    h.fc.slot_id_in_frame = static_cast<std::uint16_t>(r.get(9));
    h.fc.encapsulated_sdus = static_cast<std::uint8_t>(r.get(3));
    h.transmitter = r.get(48);
    h.receiver = r.get(48);
    h.sequence = static_cast<std::uint16_t>(r.get(12));
    h.fragment = static_cast<std::uint8_t>(r.get(4));

    malformed(slot_kind_for(h.fc.type) == expected_kind, "type",
              "PDU type does not belong in this slot kind");
    switch (h.fc.type) {
    case PduType::MGMT:
        malformed(h.fc.subtype <= kMgmtSubtypeQll, "subtype", "MGMT subtype out of range");
        break;
    case PduType::RT_DATA:
        malformed(h.fc.subtype == kRtSubtypeMelpe, "subtype",
                  "unknown RT-DATA codec family");
        break;
    case PduType::BE_DATA:
        malformed(h.fc.subtype == 0, "subtype", "BE-DATA defines no subtypes");
        break;
    case PduType::PTT_SIG:
        malformed(h.fc.subtype <= kPttSubtypeRelay, "subtype", "PTT subtype out of range");
        break;
    }
    malformed(cycle_raw <= static_cast<std::uint8_t>(CycleType::BE), "cycle_type",
              "cycle type code 3 is reserved");
    h.fc.cycle_type = static_cast<CycleType>(cycle_raw);
    malformed(h.fc.cycle_type == cycle_for(expected_kind), "cycle_type",
              "cycle type must match the slot kind");
    malformed(h.fc.frame_index < cfg.cycle_frames(expected_kind), "frame_index",
              "frame index beyond the cycle length");

    const int base = cfg.region_base(expected_kind);
    const int in_frame = h.fc.slot_id_in_frame;
    malformed(in_frame >= base && in_frame < base + cfg.slots_in_frame(expected_kind),
              "slot_id_in_frame", "slot id outside the region of its kind");
    const int expected_in_cycle =
        h.fc.frame_index * cfg.slots_in_frame(expected_kind) + (in_frame - base);
    malformed(h.fc.slot_id_in_cycle == expected_in_cycle, "slot_id_in_cycle",
              "cycle slot id inconsistent with frame index and frame slot id");

    switch (h.fc.type) {
    case PduType::MGMT: {
        malformed(h.fc.encapsulated_sdus == 0, "encapsulated_sdus",
                  "only RT-DATA encapsulates SDUs");
        MgmtBody body;
        const int n = cfg.data_slots_per_cycle();
        body.bitmap.entries.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            body.bitmap.entries.push_back(static_cast<SlotUse>(r.get(2)));
        }
        const int pad = static_cast<int>(bits.nbits - kFcsBits - r.position());
        if (h.fc.subtype == kMgmtSubtypePttRes) {
            malformed(pad >= 16, "piggyback",
                      "no room for the 16-bit PTT response in this configuration");
            PttResBody res;
            res.response = r.get(1) != 0;
            res.session_id = static_cast<std::uint16_t>(r.get(15));
            body.piggyback = res;
        } else if (h.fc.subtype == kMgmtSubtypeQll) {
            QllBody qll;
            BitWriter w;
            for (int i = 0; i < pad; ++i) {
                w.put(r.get(1), 1);
            }
            qll.opaque = w.take();
            body.piggyback = qll;
        }
        pdu.body = std::move(body);
        break;
    }
    case PduType::RT_DATA: {
        malformed(h.fc.encapsulated_sdus >= 1
                      && h.fc.encapsulated_sdus <= cfg.rt_voice_frames_per_slot,
                  "encapsulated_sdus", "RT-DATA carries 1..v voice frames");
        RtDataBody body;
        body.voice_frames.reserve(h.fc.encapsulated_sdus);
        for (int i = 0; i < h.fc.encapsulated_sdus; ++i) {
            body.voice_frames.push_back(r.get(kVoiceFrameBits));
        }
        pdu.body = std::move(body);
        break;
    }
    case PduType::BE_DATA: {
        malformed(h.fc.encapsulated_sdus == 0, "encapsulated_sdus",
                  "only RT-DATA encapsulates SDUs");
        BeDataBody body;
        body.payload.reserve(static_cast<std::size_t>(cfg.be_payload_bytes));
        for (int i = 0; i < cfg.be_payload_bytes; ++i) {
            body.payload.push_back(static_cast<std::uint8_t>(r.get(8)));
        }
        pdu.body = std::move(body);
        break;
    }
    case PduType::PTT_SIG: {
        malformed(h.fc.encapsulated_sdus == 0, "encapsulated_sdus",
                  "only RT-DATA encapsulates SDUs");
        if (h.fc.subtype == kPttSubtypeRequest) {
            PttRequestBody req;
            req.session_id = static_cast<std::uint16_t>(r.get(15));
            req.codec = static_cast<std::uint8_t>(r.get(4));
            req.rate = static_cast<std::uint8_t>(r.get(3));
            malformed(req.codec == 0, "codec", "unknown codec family");
            malformed(req.rate <= kRate600, "rate", "unknown rate code");
            pdu.body = PttSigBody{req};
        } else if (h.fc.subtype == kPttSubtypeRelease) {
            PttReleaseBody rel;
            rel.session_id = static_cast<std::uint16_t>(r.get(15));
            pdu.body = PttSigBody{rel};
        } else {
            pdu.body = PttSigBody{PttRelayBody{}};
        }
        break;
    }
    }

    h.fcs = received;
    return pdu;
}

} // namespace wbwf
