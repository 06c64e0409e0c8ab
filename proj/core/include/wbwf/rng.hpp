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

namespace wbwf {

/**
 * SplitMix64 generator.
 *
 * Used instead of the std engines/distributions because its output sequence
 * is fully specified here, which keeps traces byte-identical across
 * compilers and standard libraries.
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /** Uniform double in [0, 1), 53 random bits. */
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /** Uniform integer in [0, n), n > 0, via 128-bit fixed-point multiply. */
    std::uint32_t next_below(std::uint32_t n)
    {
        using u128 = unsigned __int128;
        return static_cast<std::uint32_t>((static_cast<u128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

/**
 * Substream purposes. The numeric values are part of the reproducibility
 * contract: changing them changes every seeded run.
 */
enum class RngStream : std::uint32_t {
    MacTsa = 1,        // per-node time-slot-allocation choices
    PhyReception = 2,  // per-node frame reception draws
    Traffic = 3,       // per-node synthetic traffic generation
};

/**
 * Derives an independent child generator from the root seed.
 *
 * The child state depends only on (root_seed, stream, index), so adding or
 * removing a node never perturbs another node's draw sequence.
 */
inline SplitMix64 substream(std::uint64_t root_seed, RngStream stream, std::uint32_t index)
{
    std::uint64_t tag =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(stream)) << 32) | index;
    SplitMix64 mixer(root_seed ^ (tag * 0x9E3779B97F4A7C15ull));
    return SplitMix64(mixer.next());
}

} // namespace wbwf
