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

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "wbwf/channel.hpp"
#include "wbwf/errors.hpp"

using namespace wbwf;

namespace {

ChannelParams defaults()
{
    ChannelParams p;
    p.ber_table = default_ber_table();
    return p;
}

} // namespace

TEST_CASE("outdoor path loss reference points")
{
    ChannelParams p = defaults();

    p.carrier_freq_mhz = 2000.0;
    CHECK(path_loss_db(1000.0, p) == doctest::Approx(128.151987246).epsilon(1e-9));

    p.carrier_freq_mhz = 2412.0;
    CHECK(path_loss_db(1000.0, p) == doctest::Approx(129.860280710).epsilon(1e-9));
    CHECK(free_space_loss_db(1000.0, p)
          == doctest::Approx(100.095329291).epsilon(1e-9));
}

TEST_CASE("path loss falls back to free space below the breakpoint")
{
    const ChannelParams p = defaults();
    // Short range lies below the dual-slope breakpoint.
    CHECK(path_loss_db(10.0, p) == doctest::Approx(free_space_loss_db(10.0, p)));
    CHECK_THROWS_AS((void)path_loss_db(0.0, p), NonPositiveDistance);
    CHECK_THROWS_AS((void)path_loss_db(-5.0, p), NonPositiveDistance);
}

TEST_CASE("noise floor for the 10 MHz profile")
{
    const ChannelParams p = defaults();
    CHECK(noise_floor_dbm(p) == doctest::Approx(-97.0).epsilon(1e-9));
    ChannelParams narrow = p;
    narrow.bandwidth_mhz = 5.0;
    CHECK(noise_floor_dbm(narrow) == doctest::Approx(-97.0 - 10.0 * std::log10(2.0)));
}

TEST_CASE("coded BER curve reference points")
{
    const ChannelParams p = defaults();
    CHECK(ber_lookup(1.5, p) == doctest::Approx(1.106522e-01).epsilon(1e-6));
    CHECK(ber_lookup(4.0, p) == doctest::Approx(1.860402e-05).epsilon(1e-6));
    CHECK(ber_lookup(12.0, p) == doctest::Approx(4.355081e-35).epsilon(1e-6));
    // Clamped at the table edges.
    CHECK(ber_lookup(-3.0, p) == doctest::Approx(0.5));
    CHECK(ber_lookup(0.9, p) == doctest::Approx(0.5));
    CHECK(ber_lookup(99.0, p) == ber_lookup(12.0, p));
}

TEST_CASE("per follows the closed form")
{
    ChannelParams p;
    p.ber_table = {{0.0, 1e-5}}; // flat: any snr sees ber 1e-5
    const double expect = 1.0 - std::pow(1.0 - 1e-5, 500.0);
    CHECK(per(3.0, 500, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(per(3.0, 0, p) == doctest::Approx(0.0));
}

TEST_CASE("per is monotone in snr and frame length")
{
    const ChannelParams p = defaults();
    double last = 1.0;
    for (double snr = -2.0; snr <= 12.0; snr += 0.25) {
        const double v = per(snr, 500, p);
        CHECK(v <= last + 1e-15);
        last = v;
    }
    CHECK(per(4.0, 1000, p) >= per(4.0, 500, p));
}

TEST_CASE("path loss is monotone in distance")
{
    const ChannelParams p = defaults();
    double last = 0.0;
    for (double d = 50.0; d <= 5000.0; d += 50.0) {
        const double v = path_loss_db(d, p);
        CHECK(v >= last);
        last = v;
    }
}

TEST_CASE("link sample composes power, snr, ber, per")
{
    const ChannelParams p = defaults();
    const LinkSample s = link_sample(750.0, 520, p);
    CHECK(s.distance_m == 750.0);
    CHECK(s.rx_power_dbm
          == doctest::Approx(p.tx_power_dbm - path_loss_db(750.0, p)));
    CHECK(s.snr_db == doctest::Approx(s.rx_power_dbm - noise_floor_dbm(p)));
    CHECK(s.ber == doctest::Approx(ber_lookup(s.snr_db, p)));
    CHECK(s.per == doctest::Approx(per(s.snr_db, 520, p)));
}

TEST_CASE("interference subtracts from the wanted signal")
{
    const ChannelParams p = defaults();
    const LinkSample s = link_sample(500.0, 520, p);
    // No interferers: plain snr.
    CHECK(sinr_with_interference(s, {}) == doctest::Approx(s.snr_db));
    // An equal-power interferer caps the sinr near 0 dB.
    const double sinr = sinr_with_interference(s, {s.rx_power_dbm});
    CHECK(sinr < 0.1);
    // A much stronger interferer drives it far down.
    CHECK(sinr_with_interference(s, {s.rx_power_dbm + 30.0}) < -25.0);
    // Interference only ever hurts.
    CHECK(sinr <= s.snr_db);
}

TEST_CASE("reception decision compares the draw against per")
{
    CHECK(receive_decision(0.0, 0.5));
    CHECK(!receive_decision(1.0, 0.5));
    CHECK(receive_decision(0.3, 0.31));
    CHECK(!receive_decision(0.3, 0.29));
}

TEST_CASE("ber table parser accepts the csv grammar")
{
    std::istringstream in(
        "snr_db,ber\n"
        "0,0.5\n"
        "\n"
        "2,1e-2\n"
        "4,1e-4\n");
    const auto table = parse_ber_table(in);
    REQUIRE(table.size() == 3);
    CHECK(table[0].snr_db == 0.0);
    CHECK(table[2].ber == doctest::Approx(1e-4));
}

TEST_CASE("ber table parser rejects bad tables")
{
    SUBCASE("empty")
    {
        std::istringstream in("snr_db,ber\n");
        CHECK_THROWS_AS((void)parse_ber_table(in), ConfigError);
    }
    SUBCASE("non-ascending snr")
    {
        std::istringstream in("snr_db,ber\n2,0.1\n1,0.2\n");
        CHECK_THROWS_AS((void)parse_ber_table(in), ConfigError);
    }
    SUBCASE("ber out of range")
    {
        std::istringstream in("snr_db,ber\n2,1.5\n");
        CHECK_THROWS_AS((void)parse_ber_table(in), ConfigError);
    }
    SUBCASE("garbage")
    {
        std::istringstream in("snr_db,ber\nabc,def\n");
        CHECK_THROWS_AS((void)parse_ber_table(in), ConfigError);
    }
}

TEST_CASE("shipped default table file equals the built-in curve")
{
    const auto shipped = load_ber_table(std::string(WBWF_REPO_DIR) + "/data/ber_default.csv");
    const auto builtin = default_ber_table();
    REQUIRE(shipped.size() == builtin.size());
    for (std::size_t i = 0; i < shipped.size(); ++i) {
        CHECK(shipped[i].snr_db == builtin[i].snr_db);
        CHECK(shipped[i].ber == builtin[i].ber);
    }
}

TEST_CASE("ideal table never loses a frame")
{
    ChannelParams p;
    p.ber_table = ideal_ber_table();
    CHECK(per(-10.0, 5000, p) == 0.0);
    CHECK(per(10.0, 5000, p) == 0.0);
}
