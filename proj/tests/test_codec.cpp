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

#include <cstdint>
#include <string>

#include "helpers.hpp"
#include "wbwf/codec.hpp"
#include "wbwf/errors.hpp"
#include "wbwf/rng.hpp"

using namespace wbwf;

#ifndef WBWF_VECTOR_DIR
#error "WBWF_VECTOR_DIR must point at the stored reference frames"
#endif

namespace {

BitString ascii_bits(const std::string& text)
{
    BitWriter w;
    for (char c : text) {
        w.put(static_cast<std::uint8_t>(c), 8);
    }
    return w.take();
}

} // namespace

TEST_CASE("FCS matches the CRC-32 check value")
{
    CHECK(fcs32(ascii_bits("123456789")) == 0xCBF43926u);
    CHECK(fcs32(BitString{}) == 0x00000000u);
}

TEST_CASE("FCS residue over a frame plus its FCS is constant")
{
    const BitString payload = ascii_bits("residue check payload");
    const std::uint32_t crc = fcs32(payload);
    BitWriter w;
    BitReader r(payload);
    for (std::size_t i = 0; i < payload.nbits; i += 8) {
        w.put(r.get(8), 8);
    }
    w.put(crc, 32);
    // Complemented CRC of (message || FCS) is the fixed residue.
    CHECK((fcs32(w.take()) ^ 0xFFFFFFFFu) == 0x2144DF1Cu);
}

TEST_CASE("stored reference frames decode to their field listings")
{
    for (const std::string& name : testutil::golden_names()) {
        CAPTURE(name);
        const testutil::GoldenVector g = testutil::load_golden(WBWF_VECTOR_DIR, name);
        const TdmaConfig cfg = table1_solution(g.solution);
        const BitString bits =
            from_hex(g.hex, static_cast<std::size_t>(cfg.slot_data_bits(g.kind)));
        const MacPdu pdu = decode(bits, cfg, g.kind);
        CHECK(pdu == g.pdu);
    }
}

TEST_CASE("stored reference frames re-encode bit-exactly")
{
    for (const std::string& name : testutil::golden_names()) {
        CAPTURE(name);
        const testutil::GoldenVector g = testutil::load_golden(WBWF_VECTOR_DIR, name);
        const TdmaConfig cfg = table1_solution(g.solution);
        const BitString bits = encode(g.pdu, cfg);
        CHECK(to_hex(bits) == g.hex);
    }
}

TEST_CASE("any single corrupted bit is caught by the FCS")
{
    // Sampled here; the acceptance suite walks every bit position.
    SplitMix64 rng(0xFC5);
    for (const std::string& name : testutil::golden_names()) {
        CAPTURE(name);
        const testutil::GoldenVector g = testutil::load_golden(WBWF_VECTOR_DIR, name);
        const TdmaConfig cfg = table1_solution(g.solution);
        const BitString good =
            from_hex(g.hex, static_cast<std::size_t>(cfg.slot_data_bits(g.kind)));
        for (int trial = 0; trial < 64; ++trial) {
            BitString bad = good;
            const std::size_t i = static_cast<std::size_t>(
                rng.next_below(static_cast<std::uint32_t>(bad.nbits)));
            bad.bytes[i / 8] ^= static_cast<std::uint8_t>(0x80u >> (i % 8));
            CHECK_THROWS_AS((void)decode(bad, cfg, g.kind), FcsMismatch);
        }
    }
}

TEST_CASE("decode rejects a frame of the wrong capacity")
{
    const TdmaConfig cfg = table1_solution(1);
    BitWriter w;
    w.put(0, 64);
    CHECK_THROWS_AS((void)decode(w.take(), cfg, SlotKind::MGMT), LengthMismatch);
}

TEST_CASE("decode rejects a PDU type that does not ride the slot kind")
{
    const TdmaConfig cfg = table1_solution(1);
    // Hand-build an RT-capacity frame with a valid FCS whose type field says
    // BE-DATA, so the field validation (not the FCS) has to reject it.
    BitWriter w;
    w.put(static_cast<std::uint64_t>(PduType::BE_DATA), 2);
    const int capacity = cfg.slot_data_bits(SlotKind::RT);
    int left = capacity - 32 - 2;
    while (left > 0) {
        const int chunk = left < 32 ? left : 32;
        w.put(0, chunk);
        left -= chunk;
    }
    const BitString body = w.take();
    BitWriter full;
    BitReader r(body);
    for (std::size_t i = 0; i < body.nbits; i += 8) {
        full.put(r.get(8), 8);
    }
    full.put(fcs32(body), 32);
    const BitString bits = full.take();
    REQUIRE(static_cast<int>(bits.nbits) == capacity);
    CHECK_THROWS_AS((void)decode(bits, cfg, SlotKind::RT), MalformedField);
}

TEST_CASE("encode rejects rule violations with the field name")
{
    const TdmaConfig cfg = table1_solution(1);
    SplitMix64 rng(0x99);

    SUBCASE("sdu count mismatch")
    {
        MacPdu pdu = testutil::random_pdu(PduType::RT_DATA, cfg, rng);
        pdu.header.fc.encapsulated_sdus =
            static_cast<std::uint8_t>(pdu.header.fc.encapsulated_sdus + 1);
        CHECK_THROWS_AS((void)encode(pdu, cfg), InvalidPdu);
    }
    SUBCASE("zero voice frames")
    {
        MacPdu pdu = testutil::random_pdu(PduType::RT_DATA, cfg, rng);
        std::get<RtDataBody>(pdu.body).voice_frames.clear();
        pdu.header.fc.encapsulated_sdus = 0;
        CHECK_THROWS_AS((void)encode(pdu, cfg), InvalidPdu);
    }
    SUBCASE("oversized voice frame")
    {
        MacPdu pdu = testutil::random_pdu(PduType::RT_DATA, cfg, rng);
        std::get<RtDataBody>(pdu.body).voice_frames[0] = 1ull << 54;
        CHECK_THROWS_AS((void)encode(pdu, cfg), InvalidPdu);
    }
    SUBCASE("bitmap length mismatch")
    {
        MacPdu pdu = testutil::random_pdu(PduType::MGMT, cfg, rng);
        std::get<MgmtBody>(pdu.body).bitmap.entries.pop_back();
        CHECK_THROWS_AS((void)encode(pdu, cfg), InvalidPdu);
    }
    SUBCASE("wrong payload size")
    {
        MacPdu pdu = testutil::random_pdu(PduType::BE_DATA, cfg, rng);
        std::get<BeDataBody>(pdu.body).payload.pop_back();
        CHECK_THROWS_AS((void)encode(pdu, cfg), InvalidPdu);
    }
    SUBCASE("slot id outside the region")
    {
        MacPdu pdu = testutil::random_pdu(PduType::RT_DATA, cfg, rng);
        pdu.header.fc.slot_id_in_frame = 0; // MGMT region
        pdu.header.fc.slot_id_in_cycle = 0;
        CHECK_THROWS_AS((void)encode(pdu, cfg), InvalidPdu);
    }
    SUBCASE("response piggyback without room")
    {
        // Solution 2 pads only 6 bits, too few for the 16-bit response.
        const TdmaConfig sol2 = table1_solution(2);
        MacPdu pdu;
        pdu.header.fc.type = PduType::MGMT;
        pdu.header.fc.subtype = kMgmtSubtypePttRes;
        pdu.header.transmitter = 0x020000000001ull;
        pdu.header.receiver = kBroadcastAddress;
        MgmtBody body;
        body.bitmap = SlotBitmap::idle(sol2.data_slots_per_cycle());
        body.piggyback = PttResBody{true, 9};
        pdu.body = body;
        CHECK_THROWS_AS((void)encode(pdu, sol2), InvalidPdu);
    }
}

TEST_CASE("randomized PDUs round trip bit-exactly across all types and configs")
{
    SplitMix64 rng(0x0DEC);
    const PduType types[] = {PduType::MGMT, PduType::RT_DATA, PduType::BE_DATA,
                             PduType::PTT_SIG};
    for (PduType type : types) {
        for (int iter = 0; iter < 1000; ++iter) {
            const TdmaConfig cfg = table1_solution(1 + iter % 3);
            const MacPdu pdu = testutil::random_pdu(type, cfg, rng);
            const BitString bits = encode(pdu, cfg);
            REQUIRE(static_cast<int>(bits.nbits) == cfg.slot_data_bits(slot_kind_for(type)));
            const MacPdu back = decode(bits, cfg, slot_kind_for(type));
            REQUIRE(back == pdu);
            REQUIRE(encode(back, cfg) == bits);
        }
    }
}
