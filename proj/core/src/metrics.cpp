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

#include "wbwf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

#include "wbwf/errors.hpp"

namespace wbwf {

void MetricsReport::set(const std::string& section, const std::string& session,
                        const std::string& receiver, const std::string& name,
                        MetricValue value)
{
    values[MetricKey{section, session, receiver, name}] = std::move(value);
}

MetricValue MetricsReport::get(const std::string& section, const std::string& session,
                               const std::string& receiver,
                               const std::string& name) const
{
    const auto it = values.find(MetricKey{section, session, receiver, name});
    if (it == values.end()) {
        return std::int64_t{0};
    }
    return it->second;
}

std::string metric_value_text(const MetricValue& value)
{
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
        return std::to_string(*i);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", std::get<double>(value));
    return buf;
}

std::string metrics_to_csv(const MetricsReport& report)
{
    std::ostringstream out;
    out << "section,session,receiver,name,value\n";
    for (const auto& [key, value] : report.values) {
        out << key.section << ',' << key.session << ',' << key.receiver << ','
            << key.name << ',' << metric_value_text(value) << '\n';
    }
    return out.str();
}

std::string metrics_to_jsonl(const MetricsReport& report)
{
    std::ostringstream out;
    for (const auto& [key, value] : report.values) {
        out << "{\"section\":\"" << key.section << "\",\"session\":\"" << key.session
            << "\",\"receiver\":\"" << key.receiver << "\",\"name\":\"" << key.name
            << "\",\"value\":" << metric_value_text(value) << "}\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

MetricValue parse_metric_value(const std::string& text)
{
    if (text.find('.') == std::string::npos) {
        try {
            std::size_t used = 0;
            const std::int64_t v = std::stoll(text, &used);
            if (used == text.size()) {
                return v;
            }
        } catch (const std::exception&) {
        }
        throw ConfigError("metric value is not a number: \"" + text + "\"");
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("metric value is not a number: \"" + text + "\"");
}

} // namespace

MetricsReport parse_metrics_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line)
            != std::vector<std::string>{"section", "session", "receiver", "name", "value"}) {
        throw ConfigError("metrics CSV must start with "
                          "`section,session,receiver,name,value`");
    }
    MetricsReport report;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw ConfigError("metrics CSV line " + std::to_string(lineno)
                              + ": expected 5 fields");
        }
        report.set(fields[0], fields[1], fields[2], fields[3],
                   parse_metric_value(fields[4]));
    }
    return report;
}

std::int64_t percentile_nearest_rank(const std::vector<std::int64_t>& sorted_samples,
                                     double pct)
{
    if (sorted_samples.empty()) {
        throw ConfigError("percentile of an empty sample set");
    }
    if (!(pct > 0.0 && pct <= 100.0)) {
        throw ConfigError("percentile must lie in (0, 100]");
    }
    const auto n = static_cast<std::int64_t>(sorted_samples.size());
    auto rank = static_cast<std::int64_t>(
        std::ceil(pct / 100.0 * static_cast<double>(n)));
    if (rank < 1) {
        rank = 1;
    }
    if (rank > n) {
        rank = n;
    }
    return sorted_samples[static_cast<std::size_t>(rank - 1)];
}

std::string aggregate_metrics_csv(const std::vector<MetricsReport>& runs)
{
    std::map<MetricKey, std::vector<double>> samples;
    for (const MetricsReport& run : runs) {
        for (const auto& [key, value] : run.values) {
            auto& vec = samples[key];
            if (vec.empty()) {
                vec.resize(runs.size(), 0.0);
            }
        }
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (const auto& [key, value] : runs[i].values) {
            const double v = std::holds_alternative<std::int64_t>(value)
                ? static_cast<double>(std::get<std::int64_t>(value))
                : std::get<double>(value);
            samples[key][i] = v;
        }
    }
    std::ostringstream out;
    out << "section,session,receiver,name,mean,stddev,runs\n";
    char buf[64];
    for (const auto& [key, vec] : samples) {
        double sum = 0.0;
        for (double v : vec) {
            sum += v;
        }
        const double mean = vec.empty() ? 0.0 : sum / static_cast<double>(vec.size());
        double var = 0.0;
        for (double v : vec) {
            var += (v - mean) * (v - mean);
        }
        if (!vec.empty()) {
            var /= static_cast<double>(vec.size());
        }
        out << key.section << ',' << key.session << ',' << key.receiver << ','
            << key.name << ',';
        std::snprintf(buf, sizeof buf, "%.6f", mean);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.6f", std::sqrt(var));
        out << buf << ',' << vec.size() << '\n';
    }
    return out.str();
}

} // namespace wbwf
