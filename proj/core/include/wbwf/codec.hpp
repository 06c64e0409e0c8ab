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

#include "wbwf/bits.hpp"
#include "wbwf/pdu.hpp"
#include "wbwf/planner.hpp"

namespace wbwf {

/**
 * Serializes a PDU into the fixed-size bit string of its slot kind:
 * 144 header bits, the typed body, zero padding up to capacity minus 32,
 * and the 32-bit FCS last. Throws InvalidPdu naming the offending field
 * when the PDU violates a type invariant for the config.
 */
BitString encode(const MacPdu& pdu, const TdmaConfig& cfg);

/**
 * Inverse of encode. The frame must match the slot's data capacity
 * (LengthMismatch), carry a verifying FCS (FcsMismatch, checked before any
 * field is interpreted), and parse into in-range fields (MalformedField).
 */
MacPdu decode(const BitString& bits, const TdmaConfig& cfg, SlotKind expected_kind);

/**
 * CRC-32 over a bit range, polynomial 0x04C11DB7 in reflected form
 * (0xEDB88320), init and final xor all-ones. Bits are consumed in stream
 * order; feeding a byte stream least-significant-bit first reproduces the
 * classic check value fcs32("123456789") = 0xCBF43926.
 */
std::uint32_t fcs32(const BitString& bits, std::size_t first_bit = 0,
                    std::size_t nbits = SIZE_MAX);

} // namespace wbwf
