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

#include "wbwf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wbwf/errors.hpp"

namespace wbwf {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // m/s

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

} // namespace

double free_space_loss_db(double distance_m, const ChannelParams& params)
{
    if (distance_m <= 0) {
        throw NonPositiveDistance();
    }
    const double f_hz = params.carrier_freq_mhz * 1e6;
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * f_hz / kSpeedOfLight);
}

double path_loss_db(double distance_m, const ChannelParams& params)
{
    if (distance_m <= 0) {
        throw NonPositiveDistance();
    }
    const double r_km = distance_m / 1000.0;
    const double dhb = params.base_height_delta_m;
    const double vehicular = 40.0 * (1.0 - 4e-3 * dhb) * std::log10(r_km)
        - 18.0 * std::log10(dhb) + 21.0 * std::log10(params.carrier_freq_mhz) + 80.0;
    // Extrapolating the vehicular fit to very short links undercuts physics;
    // free space is the lower bound on loss.
    return std::max(vehicular, free_space_loss_db(distance_m, params));
}

double noise_floor_dbm(const ChannelParams& params)
{
    return -174.0 + 10.0 * std::log10(params.bandwidth_mhz * 1e6)
        + params.noise_figure_db;
}

double rx_power_dbm(double distance_m, const ChannelParams& params)
{
    return params.tx_power_dbm - path_loss_db(distance_m, params);
}

double snr_db(double distance_m, const ChannelParams& params)
{
    return rx_power_dbm(distance_m, params) - noise_floor_dbm(params);
}

double ber_lookup(double snr_db, const ChannelParams& params)
{
    const std::vector<BerPoint>& table = params.ber_table;
    if (table.empty()) {
        throw EmptyBerTable();
    }
    if (snr_db <= table.front().snr_db) {
        return table.front().ber;
    }
    if (snr_db >= table.back().snr_db) {
        return table.back().ber;
    }
    const auto upper = std::upper_bound(
        table.begin(), table.end(), snr_db,
        [](double x, const BerPoint& p) { return x < p.snr_db; });
    const BerPoint& hi = *upper;
    const BerPoint& lo = *(upper - 1);
    const double t = (snr_db - lo.snr_db) / (hi.snr_db - lo.snr_db);
    if (lo.ber > 0 && hi.ber > 0) {
        // BER falls close to exponentially in dB, so interpolate its log.
        const double log_ber =
            std::log10(lo.ber) + t * (std::log10(hi.ber) - std::log10(lo.ber));
        return std::pow(10.0, log_ber);
    }
    return lo.ber + t * (hi.ber - lo.ber);
}

double per(double snr_db, std::int64_t frame_bits, const ChannelParams& params)
{
    const double ber = ber_lookup(snr_db, params);
    if (ber <= 0) {
        return 0.0;
    }
    if (ber >= 1) {
        return 1.0;
    }
    // 1 - (1 - ber)^n without cancellation for tiny ber.
    const double p = -std::expm1(static_cast<double>(frame_bits) * std::log1p(-ber));
    return std::clamp(p, 0.0, 1.0);
}

bool receive_decision(double per, double rng_draw)
{
    return rng_draw >= per;
}

double sinr_with_interference(const LinkSample& wanted,
                              const std::vector<double>& interferer_rx_dbm)
{
    if (interferer_rx_dbm.empty()) {
        return wanted.snr_db;
    }
    const double noise_mw = std::pow(10.0, (wanted.rx_power_dbm - wanted.snr_db) / 10.0);
    double disturbance_mw = noise_mw;
    for (double dbm : interferer_rx_dbm) {
        disturbance_mw += std::pow(10.0, dbm / 10.0);
    }
    return wanted.rx_power_dbm - 10.0 * std::log10(disturbance_mw);
}

LinkSample link_sample(double distance_m, std::int64_t frame_bits,
                       const ChannelParams& params)
{
    LinkSample s;
    s.distance_m = distance_m;
    s.rx_power_dbm = rx_power_dbm(distance_m, params);
    s.snr_db = s.rx_power_dbm - noise_floor_dbm(params);
    s.ber = ber_lookup(s.snr_db, params);
    s.per = per(s.snr_db, frame_bits, params);
    return s;
}

std::vector<BerPoint> default_ber_table()
{
    // Coded BPSK over AWGN, rate 1/2 constraint-length 7 code, union bound
    // over the leading distance-spectrum terms, capped at 0.5.
    static const struct {
        int distance;
        double weight;
    } kSpectrum[] = {
        {10, 36.0},    {12, 211.0},    {14, 1404.0},    {16, 11633.0},
        {18, 77433.0}, {20, 502690.0}, {22, 3322763.0},
    };
    std::vector<BerPoint> table;
    for (int i = 0; i <= 28; ++i) {
        const double snr_db = -2.0 + 0.5 * i;
        const double ebno = std::pow(10.0, snr_db / 10.0);
        double ber = 0.0;
        for (const auto& term : kSpectrum) {
            ber += term.weight * q_function(std::sqrt(term.distance * ebno));
        }
        table.push_back({snr_db, std::min(ber, 0.5)});
    }
    return table;
}

std::vector<BerPoint> ideal_ber_table()
{
    return {{0.0, 0.0}};
}

std::vector<BerPoint> parse_ber_table(std::istream& in)
{
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return std::string();
        }
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    if (!std::getline(in, line) || trim(line) != "snr_db,ber") {
        throw ConfigError("BER table must start with the header `snr_db,ber`");
    }
    std::vector<BerPoint> table;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("BER table line " + std::to_string(lineno)
                              + ": expected `snr_db,ber`");
        }
        BerPoint p;
        try {
            std::size_t used = 0;
            p.snr_db = std::stod(line.substr(0, comma), &used);
            if (used != comma) {
                throw std::invalid_argument("");
            }
            const std::string ber_text = trim(line.substr(comma + 1));
            p.ber = std::stod(ber_text, &used);
            if (used != ber_text.size()) {
                throw std::invalid_argument("");
            }
        } catch (const std::exception&) {
            throw ConfigError("BER table line " + std::to_string(lineno)
                              + ": malformed number");
        }
        if (!(p.ber >= 0.0 && p.ber <= 1.0)) {
            throw ConfigError("BER table line " + std::to_string(lineno)
                              + ": ber must lie in [0, 1]");
        }
        if (!table.empty()) {
            if (!(p.snr_db > table.back().snr_db)) {
                throw ConfigError("BER table line " + std::to_string(lineno)
                                  + ": snr_db must increase strictly");
            }
            if (p.ber > table.back().ber) {
                throw ConfigError("BER table line " + std::to_string(lineno)
                                  + ": ber must not increase with snr");
            }
        }
        table.push_back(p);
    }
    if (table.empty()) {
        throw ConfigError("BER table has no data rows");
    }
    return table;
}

std::vector<BerPoint> load_ber_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open BER table: " + path);
    }
    try {
        return parse_ber_table(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace wbwf
