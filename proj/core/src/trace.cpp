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

#include "wbwf/trace.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace wbwf {

namespace {

void append_json_string(std::ostream& out, const std::string& s)
{
    out << '"';
    for (char c : s) {
        switch (c) {
        case '"': out << "\\\""; break;
        case '\\': out << "\\\\"; break;
        case '\n': out << "\\n"; break;
        case '\r': out << "\\r"; break;
        case '\t': out << "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x",
                              static_cast<unsigned>(static_cast<unsigned char>(c)));
                out << buf;
            } else {
                out << c;
            }
        }
    }
    out << '"';
}

} // namespace

std::string to_json_line(const TraceEvent& event)
{
    std::ostringstream out;
    out << "{\"t_us\":" << event.t_us << ",\"node\":" << event.node << ",\"kind\":";
    append_json_string(out, event.kind);
    for (const TraceField& f : event.fields) {
        out << ',';
        append_json_string(out, f.key);
        out << ':';
        if (const auto* i = std::get_if<std::int64_t>(&f.value)) {
            out << *i;
        } else if (const auto* u = std::get_if<std::uint64_t>(&f.value)) {
            out << *u;
        } else {
            append_json_string(out, std::get<std::string>(f.value));
        }
    }
    out << '}';
    return out.str();
}

void TraceSink::write(std::ostream& out) const
{
    for (const std::string& line : lines_) {
        out << line << '\n';
    }
}

} // namespace wbwf
