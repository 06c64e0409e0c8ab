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

#include "wbwf/bits.hpp"

#include <cassert>

#include "wbwf/errors.hpp"

namespace wbwf {

void BitWriter::put(std::uint64_t value, int width)
{
    assert(width >= 0 && width <= 64);
    assert(width == 64 || (value >> width) == 0);
    for (int i = width - 1; i >= 0; --i) {
        if (out_.nbits % 8 == 0) {
            out_.bytes.push_back(0);
        }
        if ((value >> i) & 1) {
            out_.bytes[out_.nbits / 8] |= static_cast<std::uint8_t>(1u << (7 - out_.nbits % 8));
        }
        ++out_.nbits;
    }
}

BitString BitWriter::take()
{
    BitString result = std::move(out_);
    out_ = BitString{};
    return result;
}

std::uint64_t BitReader::get(int width)
{
    assert(width >= 0 && width <= 64);
    assert(pos_ + static_cast<std::size_t>(width) <= bits_.nbits);
    std::uint64_t value = 0;
    for (int i = 0; i < width; ++i) {
        value = (value << 1) | static_cast<std::uint64_t>(bits_.bit(pos_++));
    }
    return value;
}

std::string to_hex(const BitString& bits)
{
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bits.bytes.size() * 2);
    for (std::uint8_t byte : bits.bytes) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xF]);
    }
    return out;
}

static int hex_digit(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

BitString from_hex(const std::string& hex, std::size_t nbits)
{
    if (nbits == SIZE_MAX) {
        nbits = hex.size() * 4;
    }
    if (hex.size() * 4 < nbits) {
        throw ConfigError("hex string too short: " + std::to_string(hex.size())
                          + " digits cannot hold " + std::to_string(nbits) + " bits");
    }
    BitString out;
    out.nbits = nbits;
    out.bytes.assign((nbits + 7) / 8, 0);
    for (std::size_t i = 0; i < hex.size(); ++i) {
        int v = hex_digit(hex[i]);
        if (v < 0) {
            throw ConfigError(std::string("invalid hex digit '") + hex[i] + "'");
        }
        for (int b = 0; b < 4; ++b) {
            std::size_t pos = i * 4 + static_cast<std::size_t>(b);
            if (pos >= nbits) {
                break;
            }
            if ((v >> (3 - b)) & 1) {
                out.bytes[pos / 8] |= static_cast<std::uint8_t>(1u << (7 - pos % 8));
            }
        }
    }
    return out;
}

void flip_bit(BitString& bits, std::size_t position)
{
    assert(position < bits.nbits);
    bits.bytes[position / 8] ^= static_cast<std::uint8_t>(1u << (7 - position % 8));
}

} // namespace wbwf
