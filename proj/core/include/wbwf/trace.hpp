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
#include <variant>
#include <vector>

namespace wbwf {

/** One extra key of a trace event. Values stay integral or string so trace
 *  files are bit-reproducible; times are integer microseconds. */
struct TraceField {
    std::string key;
    std::variant<std::int64_t, std::uint64_t, std::string> value;
};

/**
 * One simulation event. node is the acting node index, or -1 for global
 * events (slot boundaries, medium decisions viewed network-wide).
 */
struct TraceEvent {
    std::int64_t t_us = 0;
    int node = -1;
    std::string kind;
    std::vector<TraceField> fields;
};

/** Renders one event as a single JSON object line (no trailing newline). */
std::string to_json_line(const TraceEvent& event);

/**
 * Collects events as serialized JSONL lines in emission order. When
 * disabled, emit() is a no-op, which keeps bulk runs cheap.
 */
class TraceSink {
public:
    explicit TraceSink(bool enabled = true) : enabled_(enabled) {}

    void emit(const TraceEvent& event)
    {
        if (enabled_) {
            lines_.push_back(to_json_line(event));
        }
    }

    bool enabled() const { return enabled_; }
    const std::vector<std::string>& lines() const { return lines_; }
    void write(std::ostream& out) const;

private:
    bool enabled_;
    std::vector<std::string> lines_;
};

} // namespace wbwf
