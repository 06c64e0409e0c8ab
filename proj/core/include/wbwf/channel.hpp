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
#include <iosfwd>
#include <string>
#include <vector>

namespace wbwf {

/** One point of the coded-BER lookup curve. */
struct BerPoint {
    double snr_db;
    double ber;

    bool operator==(const BerPoint&) const = default;
};

/**
 * Outdoor link parameters. Defaults: 5 W transmit power, 2412 MHz carrier,
 * 10 MHz bandwidth, 15 m antenna base height delta, 7 dB receiver noise
 * figure, and the built-in coded BER curve.
 */
struct ChannelParams {
    double tx_power_dbm = 36.99;
    double carrier_freq_mhz = 2412.0;
    double bandwidth_mhz = 10.0; // one of 20, 10, 5, 2.5, 1.25
    double base_height_delta_m = 15.0;
    double noise_figure_db = 7.0;
    std::vector<BerPoint> ber_table;

    bool operator==(const ChannelParams&) const = default;
};

/** Full link budget at one distance for one frame length. */
struct LinkSample {
    double distance_m = 0;
    double rx_power_dbm = 0;
    double snr_db = 0;
    double ber = 0;
    double per = 0;
};

/**
 * Outdoor vehicular path loss
 *   L = 40 (1 - 4e-3 dhb) log10(R_km) - 18 log10(dhb) + 21 log10(f_MHz) + 80,
 * clamped below by free-space loss so short links stay physical.
 * Throws NonPositiveDistance.
 */
double path_loss_db(double distance_m, const ChannelParams& params);

/** Free-space path loss at the params' carrier frequency. */
double free_space_loss_db(double distance_m, const ChannelParams& params);

/** Thermal noise floor: -174 dBm/Hz + 10 log10(bandwidth) + noise figure. */
double noise_floor_dbm(const ChannelParams& params);

double rx_power_dbm(double distance_m, const ChannelParams& params);

/** snr = tx_power - path_loss - noise_floor. */
double snr_db(double distance_m, const ChannelParams& params);

/**
 * Coded BER at snr from the params' lookup table: linear interpolation in
 * (dB, log10 BER), clamped at the table edges; interpolation falls back to
 * linear-in-BER when an endpoint BER is zero. Throws EmptyBerTable.
 */
double ber_lookup(double snr_db, const ChannelParams& params);

/** Packet error probability 1 - (1 - ber)^frame_bits at this snr. */
double per(double snr_db, std::int64_t frame_bits, const ChannelParams& params);

/** Delivered iff the uniform [0,1) draw is at least per. */
bool receive_decision(double per, double rng_draw);

/**
 * Signal to interference plus noise, in dB: the wanted receive power over
 * the linear sum of interferer powers and the noise implied by the sample
 * (rx_power minus snr). With no interferers this is exactly wanted.snr_db.
 */
double sinr_with_interference(const LinkSample& wanted,
                              const std::vector<double>& interferer_rx_dbm);

/** Budget chain at one distance: rx power, snr, ber, per for frame_bits. */
LinkSample link_sample(double distance_m, std::int64_t frame_bits,
                       const ChannelParams& params);

/**
 * Built-in default coded BER curve (BPSK, rate 1/2 convolutional code over
 * AWGN, union bound), identical to data/ber_default.csv.
 */
std::vector<BerPoint> default_ber_table();

/** Single-point all-zero curve: every frame decodes (packet error 0). */
std::vector<BerPoint> ideal_ber_table();

/**
 * Loads a `snr_db,ber` CSV (header required, snr strictly increasing, ber
 * non-increasing within [0,1]). Throws ConfigError on violations.
 */
std::vector<BerPoint> parse_ber_table(std::istream& in);
std::vector<BerPoint> load_ber_table(const std::string& path);

} // namespace wbwf
