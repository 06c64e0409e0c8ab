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

#include <stdexcept>
#include <string>

namespace wbwf {

/** Malformed or unsatisfiable input: config files, scenarios, tables, CLI. */
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Scenario file failed validation; message carries field-level detail. */
struct ScenarioInvalid : ConfigError {
    using ConfigError::ConfigError;
};

/** Base for PDU encode/decode failures. */
struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Frame check sequence did not verify; the frame is discarded, never parsed. */
struct FcsMismatch : CodecError {
    FcsMismatch() : CodecError("frame check sequence mismatch") {}
};

/** Frame length does not match the slot's data capacity. */
struct LengthMismatch : CodecError {
    LengthMismatch(std::size_t expected, std::size_t got)
        : CodecError("frame length " + std::to_string(got) + " bits, slot capacity "
                     + std::to_string(expected))
    {
    }
};

/** A decoded field is out of range or inconsistent with the frame plan. */
struct MalformedField : CodecError {
    std::string field;
    explicit MalformedField(std::string field_name, const std::string& detail = "")
        : CodecError("malformed field '" + field_name + "'"
                     + (detail.empty() ? "" : ": " + detail)),
          field(std::move(field_name))
    {
    }
};

/** Encode-side rejection of a PDU violating a type invariant. */
struct InvalidPdu : CodecError {
    std::string field;
    InvalidPdu(std::string field_name, const std::string& detail)
        : CodecError("invalid PDU, field '" + field_name + "': " + detail),
          field(std::move(field_name))
    {
    }
};

/** Link-budget functions require a strictly positive distance. */
struct NonPositiveDistance : std::domain_error {
    NonPositiveDistance() : std::domain_error("distance must be > 0 m") {}
};

/** The BER lookup table has no entries. */
struct EmptyBerTable : ConfigError {
    EmptyBerTable() : ConfigError("BER table is empty") {}
};

/** Base for MAC service primitive failures. */
struct MacError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SessionLimitReached : MacError {
    SessionLimitReached() : MacError("per-node PTT session limit reached") {}
};

struct UnknownSession : MacError {
    explicit UnknownSession(unsigned id)
        : MacError("unknown PTT session " + std::to_string(id))
    {
    }
};

struct AlreadyActive : MacError {
    AlreadyActive() : MacError("PTT user already in an active phase") {}
};

/**
 * A node transmitted outside its fixed MGMT slot and its claimed data slots.
 * Raised by the simulated medium as a test oracle; it aborts the run.
 */
struct ProtocolViolation : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace wbwf
