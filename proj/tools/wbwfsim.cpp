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

/*
 * wbwfsim: command line front end.
 *
 *   plan     enumerate frame configurations, or print the built-in solutions
 *   run      execute one scenario; write metrics and an optional event trace
 *   inspect  decode a hex frame against a config and list its fields
 *   sweep    run a scenario across a seed range and aggregate the metrics
 *
 * Exit codes: 0 success, 2 validation or usage error, 3 protocol violation
 * detected during a run.
 */

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "wbwf/bits.hpp"
#include "wbwf/codec.hpp"
#include "wbwf/errors.hpp"
#include "wbwf/metrics.hpp"
#include "wbwf/pdu.hpp"
#include "wbwf/planner.hpp"
#include "wbwf/scenario.hpp"
#include "wbwf/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitProtocol = 3;

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw wbwf::ConfigError("cannot open output file: " + path);
    }
    out << text;
}

// --- plan -------------------------------------------------------------------

int cmd_plan(const std::string& input_path, bool table1, const std::string& output_path)
{
    std::ostringstream out;
    if (table1) {
        for (int n = 1; n <= 3; ++n) {
            out << "# solution " << n << "\n";
            out << wbwf::tdma_config_text(wbwf::table1_solution(n));
            out << "\n";
        }
    } else {
        wbwf::PlannerInput input = input_path.empty()
            ? wbwf::reference_planner_input()
            : wbwf::load_planner_input(input_path);
        std::vector<wbwf::TdmaConfig> configs = wbwf::plan_configurations(input);
        int i = 1;
        for (const wbwf::TdmaConfig& cfg : configs) {
            out << "# configuration " << i++ << "\n";
            out << wbwf::tdma_config_text(cfg);
            out << "\n";
        }
        std::cerr << configs.size() << " configuration(s)\n";
    }
    write_text(output_path, out.str());
    return kExitOk;
}

// --- run --------------------------------------------------------------------

std::string metrics_text(const wbwf::MetricsReport& report, const std::string& format)
{
    if (format == "csv") {
        return wbwf::metrics_to_csv(report);
    }
    if (format == "jsonl") {
        return wbwf::metrics_to_jsonl(report);
    }
    throw wbwf::ConfigError("unknown metrics format: " + format);
}

int cmd_run(const std::string& scenario_path, std::int64_t seed_override,
            const std::string& trace_path, const std::string& metrics_path,
            const std::string& format)
{
    wbwf::Scenario scenario = wbwf::load_scenario(scenario_path);
    if (seed_override >= 0) {
        scenario.seed = static_cast<std::uint64_t>(seed_override);
    }
    const bool with_trace = !trace_path.empty();
    wbwf::RunResult result = wbwf::run(scenario, with_trace);
    if (with_trace) {
        std::ostringstream trace;
        for (const std::string& line : result.trace_lines) {
            trace << line << "\n";
        }
        write_text(trace_path, trace.str());
    }
    write_text(metrics_path, metrics_text(result.metrics, format));
    return kExitOk;
}

// --- inspect ----------------------------------------------------------------

std::string hex_address(std::uint64_t addr)
{
    char buf[13];
    std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(addr));
    return buf;
}

std::string read_hex_argument(const std::string& frame_arg)
{
    std::string raw = frame_arg;
    if (std::filesystem::exists(frame_arg)) {
        std::ifstream in(frame_arg);
        if (!in) {
            throw wbwf::ConfigError("cannot read frame file: " + frame_arg);
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        raw = buf.str();
    }
    std::string hex;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            hex.push_back(c);
        }
    }
    return hex;
}

void print_body(std::ostream& out, const wbwf::MacPdu& pdu)
{
    if (const auto* mgmt = std::get_if<wbwf::MgmtBody>(&pdu.body)) {
        if (std::holds_alternative<wbwf::BeaconBody>(mgmt->piggyback)) {
            out << "body_kind = beacon\n";
        } else if (std::holds_alternative<wbwf::PttResBody>(mgmt->piggyback)) {
            out << "body_kind = ptt_res\n";
        } else {
            out << "body_kind = qll\n";
        }
        out << "bitmap = ";
        for (wbwf::SlotUse use : mgmt->bitmap.entries) {
            out << static_cast<int>(use);
        }
        out << "\n";
        if (const auto* res = std::get_if<wbwf::PttResBody>(&mgmt->piggyback)) {
            out << "response = " << (res->response ? 1 : 0) << "\n";
            out << "session_id = " << res->session_id << "\n";
        } else if (const auto* qll = std::get_if<wbwf::QllBody>(&mgmt->piggyback)) {
            out << "opaque = " << wbwf::to_hex(qll->opaque) << "\n";
        }
        return;
    }
    if (const auto* sig = std::get_if<wbwf::PttSigBody>(&pdu.body)) {
        if (const auto* req = std::get_if<wbwf::PttRequestBody>(sig)) {
            out << "body_kind = ptt_request\n";
            out << "session_id = " << req->session_id << "\n";
            out << "codec = " << static_cast<int>(req->codec) << "\n";
            out << "rate = " << static_cast<int>(req->rate) << "\n";
        } else if (const auto* rel = std::get_if<wbwf::PttReleaseBody>(sig)) {
            out << "body_kind = ptt_release\n";
            out << "session_id = " << rel->session_id << "\n";
        } else {
            out << "body_kind = ptt_relay\n";
        }
        return;
    }
    if (const auto* rt = std::get_if<wbwf::RtDataBody>(&pdu.body)) {
        out << "body_kind = rt_data\n";
        out << "voice_frames = ";
        for (std::size_t i = 0; i < rt->voice_frames.size(); ++i) {
            char buf[15];
            std::snprintf(buf, sizeof buf, "%014llx",
                          static_cast<unsigned long long>(rt->voice_frames[i]));
            out << (i ? "," : "") << buf;
        }
        out << "\n";
        return;
    }
    const auto& be = std::get<wbwf::BeDataBody>(pdu.body);
    out << "body_kind = be_data\n";
    out << "payload = ";
    for (std::uint8_t byte : be.payload) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", byte);
        out << buf;
    }
    out << "\n";
}

int cmd_inspect(int solution, const std::string& config_path, const std::string& kind_name,
                const std::string& frame_arg, const std::string& output_path)
{
    wbwf::TdmaConfig cfg;
    std::string config_name;
    if (solution > 0) {
        cfg = wbwf::table1_solution(solution);
        config_name = "sol" + std::to_string(solution);
    } else {
        cfg = wbwf::load_tdma_config(config_path);
        config_name = std::filesystem::path(config_path).stem().string();
    }

    wbwf::SlotKind kind;
    if (kind_name == "mgmt") {
        kind = wbwf::SlotKind::MGMT;
    } else if (kind_name == "rt") {
        kind = wbwf::SlotKind::RT;
    } else if (kind_name == "be") {
        kind = wbwf::SlotKind::BE;
    } else {
        throw wbwf::ConfigError("unknown slot kind: " + kind_name);
    }

    const std::string hex = read_hex_argument(frame_arg);
    const int capacity = cfg.slot_data_bits(kind);
    wbwf::BitString bits = wbwf::from_hex(hex, static_cast<std::size_t>(capacity));
    wbwf::MacPdu pdu = wbwf::decode(bits, cfg, kind);

    std::ostringstream out;
    out << "config = " << config_name << "\n";
    out << "kind = " << kind_name << "\n";
    out << "type = " << wbwf::to_string(pdu.header.fc.type) << "\n";
    out << "subtype = " << static_cast<int>(pdu.header.fc.subtype) << "\n";
    out << "more_frag = " << (pdu.header.fc.more_fragment ? 1 : 0) << "\n";
    out << "cycle_type = " << wbwf::to_string(pdu.header.fc.cycle_type) << "\n";
    out << "frame_index = " << static_cast<int>(pdu.header.fc.frame_index) << "\n";
    out << "slot_id_in_cycle = " << pdu.header.fc.slot_id_in_cycle << "\n";
    out << "slot_id_in_frame = " << pdu.header.fc.slot_id_in_frame << "\n";
    out << "encapsulated_sdus = " << static_cast<int>(pdu.header.fc.encapsulated_sdus) << "\n";
    out << "transmitter = " << hex_address(pdu.header.transmitter) << "\n";
    out << "receiver = " << hex_address(pdu.header.receiver) << "\n";
    out << "sequence = " << pdu.header.sequence << "\n";
    out << "fragment = " << static_cast<int>(pdu.header.fragment) << "\n";
    print_body(out, pdu);
    write_text(output_path, out.str());
    return kExitOk;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const std::string& scenario_path, std::int64_t seed_start, int seed_count,
              const std::string& metrics_path)
{
    wbwf::Scenario scenario = wbwf::load_scenario(scenario_path);
    std::vector<wbwf::MetricsReport> runs;
    runs.reserve(static_cast<std::size_t>(seed_count));
    for (int i = 0; i < seed_count; ++i) {
        scenario.seed = static_cast<std::uint64_t>(seed_start + i);
        runs.push_back(wbwf::run(scenario, /*with_trace=*/false).metrics);
    }
    write_text(metrics_path, wbwf::aggregate_metrics_csv(runs));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"TDMA wideband waveform simulator"};
    app.require_subcommand(1);

    // plan
    std::string plan_input;
    std::string plan_output;
    bool plan_table1 = false;
    CLI::App* plan = app.add_subcommand("plan", "Enumerate frame configurations");
    plan->add_option("input", plan_input, "Planner input file (defaults built in)");
    plan->add_flag("--table1", plan_table1, "Print the three built-in solutions");
    plan->add_option("--output", plan_output, "Write configurations to a file");

    // run
    std::string run_scenario;
    std::int64_t run_seed = -1;
    std::string run_trace;
    std::string run_metrics;
    std::string run_format = "csv";
    CLI::App* run = app.add_subcommand("run", "Execute a scenario");
    run->add_option("scenario", run_scenario, "Scenario file")->required();
    run->add_option("--seed", run_seed, "Override the scenario seed");
    run->add_option("--trace", run_trace, "Write the event trace (JSON lines)");
    run->add_option("--metrics", run_metrics, "Write metrics to a file (default stdout)");
    run->add_option("--format", run_format, "Metrics format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // inspect
    int inspect_solution = 0;
    std::string inspect_config;
    std::string inspect_kind;
    std::string inspect_frame;
    std::string inspect_output;
    CLI::App* inspect = app.add_subcommand("inspect", "Decode a hex frame");
    CLI::Option* opt_solution =
        inspect->add_option("--solution", inspect_solution, "Built-in solution number (1..3)")
            ->check(CLI::Range(1, 3));
    CLI::Option* opt_config =
        inspect->add_option("--config", inspect_config, "Frame plan document");
    opt_solution->excludes(opt_config);
    inspect->add_option("--kind", inspect_kind, "Slot kind the frame was sent in")
        ->check(CLI::IsMember({"mgmt", "rt", "be"}))
        ->required();
    inspect->add_option("frame", inspect_frame, "Hex string, or a file holding one")
        ->required();
    inspect->add_option("--output", inspect_output, "Write the field listing to a file");

    // sweep
    std::string sweep_scenario;
    std::int64_t sweep_seed_start = 1;
    int sweep_seed_count = 10;
    std::string sweep_metrics;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario across a seed range");
    sweep->add_option("scenario", sweep_scenario, "Scenario file")->required();
    sweep->add_option("--seed-start", sweep_seed_start, "First seed");
    sweep->add_option("--seed-count", sweep_seed_count, "Number of seeds")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--metrics", sweep_metrics, "Write the aggregate to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (plan->parsed()) {
            return cmd_plan(plan_input, plan_table1, plan_output);
        }
        if (run->parsed()) {
            return cmd_run(run_scenario, run_seed, run_trace, run_metrics, run_format);
        }
        if (inspect->parsed()) {
            if (inspect_solution == 0 && inspect_config.empty()) {
                std::cerr << "inspect: give --solution or --config\n";
                return kExitValidation;
            }
            return cmd_inspect(inspect_solution, inspect_config, inspect_kind, inspect_frame,
                               inspect_output);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_scenario, sweep_seed_start, sweep_seed_count, sweep_metrics);
        }
    } catch (const wbwf::ProtocolViolation& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return kExitProtocol;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
