// SPDX-License-Identifier: Apache-2.0
//
// Scenario runner and report emitter: simulate | synth | sense | drain.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "wakesim/csi.hpp"
#include "wakesim/energy.hpp"
#include "wakesim/scenario.hpp"
#include "wakesim/sensing.hpp"
#include "wakesim/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool json_output = false;
};

void emit(const GlobalOptions& opts, const json& doc, const std::string& text) {
    if (opts.json_output) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

int run_simulate(const GlobalOptions& opts, const std::string& scenario_path) {
    wakesim::Scenario scenario = wakesim::load_scenario_file(scenario_path);
    if (opts.seed) scenario.seed = *opts.seed;
    const wakesim::SimResult result = wakesim::run_scenario(scenario);

    fs::create_directories(opts.out_dir);
    {
        std::ofstream out(fs::path(opts.out_dir) / "events.csv", std::ios::binary);
        wakesim::write_events_csv(result, out);
    }
    {
        std::ofstream out(fs::path(opts.out_dir) / "awake_timeline.csv", std::ios::binary);
        wakesim::write_timeline_csv(result, out);
    }
    {
        std::ofstream out(fs::path(opts.out_dir) / "ledgers.json", std::ios::binary);
        wakesim::write_ledgers_json(result, out);
    }

    json summary;
    summary["outputs"] = {"events.csv", "awake_timeline.csv", "ledgers.json"};
    summary["queries_sent"] = result.attacker_queries_sent;
    summary["replies_heard"] = result.attacker_replies_heard;
    summary["reply_fraction"] = result.reply_fraction();
    summary["warnings"] = result.warnings;
    std::string text = "wrote events.csv, awake_timeline.csv, ledgers.json to " + opts.out_dir + "\n";
    for (const auto& station : result.stations) {
        summary["awake_fraction"][station.mac.to_string()] = station.awake_fraction;
        char line[160];
        std::snprintf(line, sizeof(line), "station %s awake fraction %.4f, %llu responses\n",
                      station.mac.to_string().c_str(), station.awake_fraction,
                      static_cast<unsigned long long>(station.responses_sent));
        text += line;
    }
    for (const auto& warning : result.warnings) text += "warning: " + warning + "\n";
    {
        char line[160];
        std::snprintf(line, sizeof(line),
                      "attacker sent %llu queries, heard %llu replies (%.4f)\n",
                      static_cast<unsigned long long>(result.attacker_queries_sent),
                      static_cast<unsigned long long>(result.attacker_replies_heard),
                      result.reply_fraction());
        text += line;
    }
    emit(opts, summary, text);
    return 0;
}

int run_synth(const GlobalOptions& opts, const std::string& scenario_path) {
    wakesim::Scenario scenario = wakesim::load_scenario_file(scenario_path);
    if (!scenario.breath) {
        throw wakesim::ScenarioError(scenario_path + ": no \"breath\" section for synth");
    }
    if (opts.seed) scenario.breath->seed = *opts.seed;
    const wakesim::CsiTrace trace = wakesim::synthesize_trace(*scenario.breath);

    fs::create_directories(opts.out_dir);
    const fs::path trace_path = fs::path(opts.out_dir) / "trace.csv";
    wakesim::write_trace_csv_file(trace, trace_path.string());

    json summary;
    summary["trace"] = trace_path.string();
    summary["samples"] = trace.sample_count();
    summary["duration_s"] = trace.duration_s();
    char text[160];
    std::snprintf(text, sizeof(text), "wrote %lld samples spanning %.3f s to %s\n",
                  static_cast<long long>(trace.sample_count()), trace.duration_s(),
                  trace_path.string().c_str());
    emit(opts, summary, text);
    return 0;
}

int run_sense(const GlobalOptions& opts, const std::string& trace_path,
              const wakesim::PipelineConfig& config, std::optional<double> truth_bpm) {
    config.validate();
    const wakesim::CsiTrace trace = wakesim::read_trace_csv_file(trace_path);
    const auto estimates = wakesim::sliding_estimate(trace, config);

    fs::create_directories(opts.out_dir);
    const fs::path estimates_path = fs::path(opts.out_dir) / "estimates.jsonl";
    {
        std::ofstream out(estimates_path, std::ios::binary);
        for (const auto& estimate : estimates) {
            json record;
            record["window_start_s"] = estimate.window_start_s;
            record["window_end_s"] = estimate.window_end_s;
            record["rate_bpm"] = estimate.rate_bpm;
            record["weight"] = estimate.vote_weight;
            out << record.dump() << "\n";
        }
    }

    std::size_t detected = 0;
    for (const auto& estimate : estimates) {
        if (estimate.rate_bpm != wakesim::kNoBreathing) ++detected;
    }

    json summary;
    summary["estimates"] = estimates_path.string();
    summary["windows"] = estimates.size();
    summary["detected"] = detected;
    std::string text;
    {
        char line[160];
        std::snprintf(line, sizeof(line), "%zu windows, %zu with a detected rate -> %s\n",
                      estimates.size(), detected, estimates_path.string().c_str());
        text = line;
    }
    if (truth_bpm) {
        double abs_error_sum = 0.0;
        double ratio_sum = 0.0;
        std::size_t within_1 = 0;
        for (const auto& estimate : estimates) {
            if (estimate.rate_bpm == wakesim::kNoBreathing) continue;
            const double err = std::abs(estimate.rate_bpm - *truth_bpm);
            abs_error_sum += err;
            ratio_sum += estimate.rate_bpm / *truth_bpm;
            if (err <= 1.0) ++within_1;
        }
        const double n = detected > 0 ? static_cast<double>(detected) : 1.0;
        summary["truth_bpm"] = *truth_bpm;
        summary["mean_abs_error_bpm"] = abs_error_sum / n;
        summary["mean_accuracy_ratio"] = ratio_sum / n;
        summary["within_1bpm_fraction"] =
            estimates.empty() ? 0.0 : static_cast<double>(within_1) / estimates.size();
        char line[200];
        std::snprintf(line, sizeof(line),
                      "vs truth %.2f bpm: mean |error| %.3f bpm, accuracy ratio %.4f, "
                      "%.1f%% of windows within 1 bpm\n",
                      *truth_bpm, abs_error_sum / n, ratio_sum / n,
                      estimates.empty() ? 0.0
                                        : 100.0 * static_cast<double>(within_1) /
                                              static_cast<double>(estimates.size()));
        text += line;
    }
    emit(opts, summary, text);
    return 0;
}

int run_drain(const std::string& query, double bitrate,
              const std::string& device_name, const std::string& battery_name, double fraction,
              double beacon_period_ms, const std::string& profiles_path,
              const std::string& phy_preset) {
    wakesim::ProfileLibrary library = wakesim::ProfileLibrary::builtin();
    if (!profiles_path.empty()) library.merge_json_file(profiles_path);

    const auto kind = wakesim::parse_frame_kind(query);
    if (!kind) throw std::invalid_argument("unknown query kind '" + query + "'");
    const auto phy = wakesim::PhyTiming::preset(phy_preset);
    if (!phy) throw std::invalid_argument("unknown PHY preset '" + phy_preset + "'");

    const auto& device = library.device(device_name);
    const auto& battery = library.battery(battery_name);

    wakesim::AttackConfig config;
    config.query_kind = *kind;
    config.query_bitrate_mbps = bitrate;
    config.rate_mode = wakesim::QueryRateMode::Saturate;
    config.beacon_period_ns = wakesim::us_to_ns(beacon_period_ms * 1000.0);

    const wakesim::TimeFractions fractions = wakesim::victim_airtime(config, *phy);
    const double power = wakesim::average_power_w(device, fractions);
    const double minutes = wakesim::drain_time_minutes(battery, power, fraction);

    json report;
    report["device"] = device.name;
    report["battery"] = battery.name;
    report["query"] = query;
    report["bitrate_mbps"] = bitrate;
    report["fraction"] = fraction;
    report["avg_power_W"] = power;
    report["time_fractions"] = {{"sleep", fractions.sleep},
                                {"idle", fractions.idle},
                                {"rx", fractions.rx},
                                {"tx", fractions.tx}};
    report["minutes"] = minutes;
    report["hours"] = minutes / 60.0;
    std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"802.11 keep-awake / universal-ACK simulator and analysis toolkit"};
    app.require_subcommand(1);

    GlobalOptions opts;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the scenario seed");
    app.add_option("--out", opts.out_dir, "Output directory (default .)");
    app.add_flag("--json", opts.json_output, "Machine-readable stdout/stderr");

    std::string scenario_path;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario's event loop");
    simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();

    std::string synth_path;
    auto* synth = app.add_subcommand("synth", "Synthesize a CSI trace");
    synth->add_option("scenario", synth_path, "Scenario JSON file with a breath section")
        ->required();

    std::string trace_path;
    wakesim::PipelineConfig pipeline;
    double truth_bpm = 0.0;
    auto* sense = app.add_subcommand("sense", "Estimate breathing rate from a CSI trace");
    sense->add_option("trace", trace_path, "CSI trace CSV")->required();
    auto* truth_opt = sense->add_option("--truth-bpm", truth_bpm, "Ground-truth rate");
    sense->add_option("--window", pipeline.window_s, "Window length in seconds");
    sense->add_option("--stride", pipeline.stride_s, "Stride in seconds");
    sense->add_option("--cutoff", pipeline.lowpass_cutoff_hz, "Low-pass cutoff in Hz");
    sense->add_option("--band-lo", pipeline.band_lo_hz, "Band lower edge in Hz");
    sense->add_option("--band-hi", pipeline.band_hi_hz, "Band upper edge in Hz");
    sense->add_option("--majority", pipeline.majority_fraction, "Vote majority fraction");
    sense->add_option("--pad-factor", pipeline.zero_pad_factor, "FFT zero-padding factor");
    sense->add_option("--min-par", pipeline.min_par_for_vote, "Peak-to-average vote floor");

    std::string query = "bar";
    double bitrate = 1.0;
    std::string device_name;
    std::string battery_name;
    double fraction = 1.0;
    double beacon_period_ms = 0.0;
    std::string profiles_path;
    std::string phy_preset = "g24";
    auto* drain = app.add_subcommand("drain", "Battery drain prediction");
    drain->add_option("--query", query, "Query frame kind (null|rts|bar|data:<n>)");
    drain->add_option("--bitrate", bitrate, "Query bitrate in Mbps");
    drain->add_option("--device", device_name, "Device profile name")->required();
    drain->add_option("--battery", battery_name, "Battery name")->required();
    drain->add_option("--fraction", fraction, "Battery fraction to drain, (0, 1]");
    drain->add_option("--beacon-period-ms", beacon_period_ms, "Keep-awake beacon period");
    drain->add_option("--profiles", profiles_path, "Extra profile library JSON");
    drain->add_option("--phy", phy_preset, "PHY preset (g24|g24-short-slot|a5)");

    CLI11_PARSE(app, argc, argv);
    if (!seed_opt->empty()) opts.seed = seed_value;

    try {
        if (simulate->parsed()) return run_simulate(opts, scenario_path);
        if (synth->parsed()) return run_synth(opts, synth_path);
        if (sense->parsed()) {
            return run_sense(opts, trace_path, pipeline,
                             truth_opt->empty() ? std::nullopt : std::optional<double>(truth_bpm));
        }
        if (drain->parsed()) {
            return run_drain(query, bitrate, device_name, battery_name, fraction,
                             beacon_period_ms, profiles_path, phy_preset);
        }
    } catch (const std::exception& e) {
        if (opts.json_output) {
            json error;
            error["error"] = e.what();
            std::cerr << error.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 1;
    }
    return 0;
}
