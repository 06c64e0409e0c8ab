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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace wbwf {

/**
 * A sequence of bits packed most-significant-bit first into bytes.
 *
 * This is the single normative serialization order for everything that
 * crosses the simulated air interface: multi-bit values are written
 * MSB-first, and bit i of the stream lives in bit (7 - i % 8) of byte i / 8.
 * Trailing bits of the last byte are zero.
 */
struct BitString {
    std::vector<std::uint8_t> bytes;
    std::size_t nbits = 0;

    bool operator==(const BitString&) const = default;

    /** Bit at stream position i (0 or 1). Caller must keep i < nbits. */
    int bit(std::size_t i) const
    {
        return (bytes[i / 8] >> (7 - i % 8)) & 1;
    }
};

/** Appends values MSB-first to a BitString. */
class BitWriter {
public:
    /** Appends the low `width` bits of value, most significant first. */
    void put(std::uint64_t value, int width);

    std::size_t bit_size() const { return out_.nbits; }

    /** Hands out the accumulated bits; the writer is left empty. */
    BitString take();

private:
    BitString out_;
};

/** Reads values MSB-first from a BitString. */
class BitReader {
public:
    explicit BitReader(const BitString& bits) : bits_(bits) {}

    /** Reads `width` bits as one value. Caller must not read past the end. */
    std::uint64_t get(int width);

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bits_.nbits - pos_; }

private:
    const BitString& bits_;
    std::size_t pos_ = 0;
};

/** Lowercase hex of the packed bytes (trailing pad bits are zero). */
std::string to_hex(const BitString& bits);

/**
 * Parses lowercase/uppercase hex into a BitString of `nbits` bits.
 * nbits defaults to 4 bits per hex digit. Throws ConfigError on bad input
 * or when the digits cannot hold nbits.
 */
BitString from_hex(const std::string& hex, std::size_t nbits = SIZE_MAX);

/** Flips one bit in place; position must be < nbits. */
void flip_bit(BitString& bits, std::size_t position);

} // namespace wbwf
