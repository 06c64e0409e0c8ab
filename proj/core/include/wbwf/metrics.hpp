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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace wbwf {

/**
 * Long-format metric address. session and receiver are "-" where they do
 * not apply (network-wide counters).
 */
struct MetricKey {
    std::string section;
    std::string session;
    std::string receiver;
    std::string name;

    auto operator<=>(const MetricKey&) const = default;
};

using MetricValue = std::variant<std::int64_t, double>;

/**
 * Simulation results in long format. Integer counters stay integral so
 * reports compare byte-identical; ratios are fixed six-decimal doubles.
 */
struct MetricsReport {
    std::map<MetricKey, MetricValue> values;

    void set(const std::string& section, const std::string& session,
             const std::string& receiver, const std::string& name, MetricValue value);
    /** Missing keys read as int64 0. */
    MetricValue get(const std::string& section, const std::string& session,
                    const std::string& receiver, const std::string& name) const;

    bool operator==(const MetricsReport&) const = default;
};

/** Deterministic text form of one value (integers plain, doubles %.6f). */
std::string metric_value_text(const MetricValue& value);

/** CSV with header `section,session,receiver,name,value`. */
std::string metrics_to_csv(const MetricsReport& report);

/** One JSON object per line, keys section/session/receiver/name/value. */
std::string metrics_to_jsonl(const MetricsReport& report);

MetricsReport parse_metrics_csv(std::istream& in);

/**
 * Nearest-rank percentile of sorted integer samples: the smallest value
 * whose rank is >= ceil(pct/100 * n). Integer result keeps reports
 * platform-exact. pct in (0, 100]; samples must be non-empty and sorted.
 */
std::int64_t percentile_nearest_rank(const std::vector<std::int64_t>& sorted_samples,
                                     double pct);

/**
 * Seed-sweep aggregation: per metric key, mean and (population) standard
 * deviation across runs. Keys absent from some run contribute zero.
 */
std::string aggregate_metrics_csv(const std::vector<MetricsReport>& runs);

} // namespace wbwf
