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

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbwf/bits.hpp"
#include "wbwf/channel.hpp"
#include "wbwf/pdu.hpp"
#include "wbwf/planner.hpp"
#include "wbwf/rng.hpp"
#include "wbwf/scenario.hpp"

namespace testutil {

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string strip_ws(const std::string& text)
{
    std::string out;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
        }
    }
    return out;
}

/** `key = value` lines into an ordered map; later keys overwrite. */
inline std::map<std::string, std::string> parse_kv(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

/** One stored reference frame: the hex file and the decoded field listing. */
struct GoldenVector {
    std::string name;
    int solution = 0;
    wbwf::SlotKind kind = wbwf::SlotKind::MGMT;
    std::string kind_name;
    std::string hex;
    wbwf::MacPdu pdu;
};

inline std::uint64_t parse_hex_u64(const std::string& text)
{
    return std::stoull(text, nullptr, 16);
}

inline wbwf::SlotBitmap parse_bitmap(const std::string& digits)
{
    wbwf::SlotBitmap bitmap;
    for (char c : digits) {
        bitmap.entries.push_back(static_cast<wbwf::SlotUse>(c - '0'));
    }
    return bitmap;
}

/** Rebuilds the expected MacPdu from a stored field listing. */
inline GoldenVector load_golden(const std::string& dir, const std::string& name)
{
    GoldenVector g;
    g.name = name;
    g.hex = strip_ws(slurp(dir + "/" + name + ".hex"));
    const auto kv = parse_kv(slurp(dir + "/" + name + ".fields"));

    g.solution = std::stoi(kv.at("config").substr(3)); // "solN"
    g.kind_name = kv.at("kind");
    if (g.kind_name == "mgmt") {
        g.kind = wbwf::SlotKind::MGMT;
    } else if (g.kind_name == "rt") {
        g.kind = wbwf::SlotKind::RT;
    } else {
        g.kind = wbwf::SlotKind::BE;
    }

    wbwf::MacHeader& h = g.pdu.header;
    const std::string type = kv.at("type");
    h.fc.type = type == "MGMT"      ? wbwf::PduType::MGMT
        : type == "RT_DATA"         ? wbwf::PduType::RT_DATA
        : type == "BE_DATA"         ? wbwf::PduType::BE_DATA
                                    : wbwf::PduType::PTT_SIG;
    h.fc.subtype = static_cast<std::uint8_t>(std::stoi(kv.at("subtype")));
    h.fc.more_fragment = kv.at("more_frag") == "1";
    const std::string cycle = kv.at("cycle_type");
    h.fc.cycle_type = cycle == "MGMT" ? wbwf::CycleType::MGMT
        : cycle == "RT"               ? wbwf::CycleType::RT
                                      : wbwf::CycleType::BE;
    h.fc.frame_index = static_cast<std::uint8_t>(std::stoi(kv.at("frame_index")));
    h.fc.slot_id_in_cycle = static_cast<std::uint16_t>(std::stoi(kv.at("slot_id_in_cycle")));
    h.fc.slot_id_in_frame = static_cast<std::uint16_t>(std::stoi(kv.at("slot_id_in_frame")));
    h.fc.encapsulated_sdus = static_cast<std::uint8_t>(std::stoi(kv.at("encapsulated_sdus")));
    h.transmitter = parse_hex_u64(kv.at("transmitter"));
    h.receiver = parse_hex_u64(kv.at("receiver"));
    h.sequence = static_cast<std::uint16_t>(std::stoi(kv.at("sequence")));
    h.fragment = static_cast<std::uint8_t>(std::stoi(kv.at("fragment")));

    const std::string body = kv.at("body_kind");
    if (body == "beacon" || body == "ptt_res" || body == "qll") {
        wbwf::MgmtBody mgmt;
        mgmt.bitmap = parse_bitmap(kv.at("bitmap"));
        if (body == "ptt_res") {
            wbwf::PttResBody res;
            res.response = kv.at("response") == "1";
            res.session_id = static_cast<std::uint16_t>(std::stoi(kv.at("session_id")));
            mgmt.piggyback = res;
        } else if (body == "qll") {
            wbwf::QllBody qll;
            qll.opaque = wbwf::from_hex(kv.at("opaque"));
            mgmt.piggyback = qll;
        }
        g.pdu.body = mgmt;
    } else if (body == "ptt_request") {
        wbwf::PttRequestBody req;
        req.session_id = static_cast<std::uint16_t>(std::stoi(kv.at("session_id")));
        req.codec = static_cast<std::uint8_t>(std::stoi(kv.at("codec")));
        req.rate = static_cast<std::uint8_t>(std::stoi(kv.at("rate")));
        g.pdu.body = wbwf::PttSigBody{req};
    } else if (body == "ptt_release") {
        wbwf::PttReleaseBody rel;
        rel.session_id = static_cast<std::uint16_t>(std::stoi(kv.at("session_id")));
        g.pdu.body = wbwf::PttSigBody{rel};
    } else if (body == "rt_data") {
        wbwf::RtDataBody rt;
        std::istringstream frames(kv.at("voice_frames"));
        std::string item;
        while (std::getline(frames, item, ',')) {
            rt.voice_frames.push_back(parse_hex_u64(item));
        }
        g.pdu.body = rt;
    } else if (body == "be_data") {
        wbwf::BeDataBody be;
        const std::string hex = kv.at("payload");
        for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
            be.payload.push_back(
                static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
        }
        g.pdu.body = be;
    } else {
        throw std::runtime_error("unknown body_kind " + body);
    }
    return g;
}

inline const std::vector<std::string>& golden_names()
{
    static const std::vector<std::string> names = {
        "mgmt_beacon_sol3", "mgmt_pttres_sol1", "mgmt_pttres_sol3",
        "rt_data_sol1",     "rt_data_sol3",     "be_data_sol1",
        "be_data_sol3",     "ptt_request_sol3", "ptt_release_sol1",
    };
    return names;
}

/** Uniformly random PDU of `type` that satisfies every encoding rule. */
inline wbwf::MacPdu random_pdu(wbwf::PduType type, const wbwf::TdmaConfig& cfg,
                               wbwf::SplitMix64& rng)
{
    using namespace wbwf;
    const SlotKind kind = slot_kind_for(type);
    MacPdu pdu;
    MacHeader& h = pdu.header;
    h.fc.type = type;
    h.fc.cycle_type = kind == SlotKind::MGMT ? CycleType::MGMT
        : kind == SlotKind::RT               ? CycleType::RT
                                             : CycleType::BE;
    h.fc.more_fragment = rng.next_below(2) != 0;
    h.fc.frame_index =
        static_cast<std::uint8_t>(rng.next_below(static_cast<std::uint32_t>(cfg.cycle_frames(kind))));
    const int in_region =
        static_cast<int>(rng.next_below(static_cast<std::uint32_t>(cfg.slots_in_frame(kind))));
    h.fc.slot_id_in_frame = static_cast<std::uint16_t>(cfg.region_base(kind) + in_region);
    h.fc.slot_id_in_cycle =
        static_cast<std::uint16_t>(h.fc.frame_index * cfg.slots_in_frame(kind) + in_region);
    h.transmitter = rng.next() & kBroadcastAddress;
    h.receiver = rng.next() & kBroadcastAddress;
    h.sequence = static_cast<std::uint16_t>(rng.next_below(1u << 12));
    h.fragment = static_cast<std::uint8_t>(rng.next_below(1u << 4));

    switch (type) {
    case PduType::MGMT: {
        MgmtBody body;
        for (int i = 0; i < cfg.data_slots_per_cycle(); ++i) {
            body.bitmap.entries.push_back(static_cast<SlotUse>(rng.next_below(4)));
        }
        const bool res_fits = cfg.mgmt_padded_bits >= 16;
        const std::uint32_t pick = rng.next_below(res_fits ? 3 : 2);
        if (pick == 0) {
            h.fc.subtype = kMgmtSubtypeBeacon;
        } else if (pick == 1) {
            h.fc.subtype = kMgmtSubtypeQll;
            BitWriter w;
            for (int i = 0; i < cfg.mgmt_padded_bits; ++i) {
                w.put(rng.next() & 1, 1);
            }
            body.piggyback = QllBody{w.take()};
        } else {
            h.fc.subtype = kMgmtSubtypePttRes;
            PttResBody res;
            res.response = rng.next_below(2) != 0;
            res.session_id = static_cast<std::uint16_t>(rng.next_below(1u << 15));
            body.piggyback = res;
        }
        pdu.body = body;
        break;
    }
    case PduType::RT_DATA: {
        h.fc.subtype = kRtSubtypeMelpe;
        RtDataBody body;
        const int n =
            1 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(cfg.rt_voice_frames_per_slot)));
        for (int i = 0; i < n; ++i) {
            body.voice_frames.push_back(rng.next() & ((1ull << 54) - 1));
        }
        h.fc.encapsulated_sdus = static_cast<std::uint8_t>(n);
        pdu.body = body;
        break;
    }
    case PduType::BE_DATA: {
        h.fc.subtype = 0;
        BeDataBody body;
        for (int i = 0; i < cfg.be_payload_bytes; ++i) {
            body.payload.push_back(static_cast<std::uint8_t>(rng.next_below(256)));
        }
        pdu.body = body;
        break;
    }
    case PduType::PTT_SIG: {
        const std::uint32_t pick = rng.next_below(3);
        if (pick == 0) {
            h.fc.subtype = kPttSubtypeRequest;
            PttRequestBody req;
            req.session_id = static_cast<std::uint16_t>(rng.next_below(1u << 15));
            req.codec = 0; // only the 2400 bps family decodes
            req.rate = static_cast<std::uint8_t>(rng.next_below(wbwf::kRate600 + 1u));
            pdu.body = PttSigBody{req};
        } else if (pick == 1) {
            h.fc.subtype = kPttSubtypeRelease;
            PttReleaseBody rel;
            rel.session_id = static_cast<std::uint16_t>(rng.next_below(1u << 15));
            pdu.body = PttSigBody{rel};
        } else {
            h.fc.subtype = kPttSubtypeRelay;
            pdu.body = PttSigBody{PttRelayBody{}};
        }
        break;
    }
    }
    return pdu;
}

/** All-in-range scenario on an ideal channel; nodes on a short line. */
inline wbwf::Scenario dense_scenario(int nodes, int solution, std::int64_t duration_us,
                                     std::uint64_t seed)
{
    wbwf::Scenario s;
    s.duration_us = duration_us;
    s.seed = seed;
    s.tdma = wbwf::table1_solution(solution);
    s.channel.ber_table = wbwf::ideal_ber_table();
    for (int i = 0; i < nodes; ++i) {
        wbwf::NodeSpec n;
        n.index = i;
        n.x_m = 60.0 * i;
        n.y_m = (i % 2) ? 40.0 : 0.0;
        n.mgmt_slot = i;
        s.nodes.push_back(n);
    }
    return s;
}

} // namespace testutil
