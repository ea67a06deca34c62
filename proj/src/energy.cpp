// SPDX-License-Identifier: Apache-2.0
#include "wakesim/energy.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace wakesim {

namespace {

// Bare power-save schedule constants for the no-attack baseline: one beacon
// reception plus a short listen lead per 102.4 ms TBTT.
constexpr double kTbttUs = 102'400.0;
constexpr double kListenLeadUs = 2'000.0;

}  // namespace

void validate(const DeviceProfile& profile) {
    const bool ordered = profile.tx_mA >= profile.rx_mA && profile.rx_mA >= profile.idle_mA &&
                         profile.idle_mA >= profile.sleep_mA && profile.sleep_mA >= 0.0;
    if (!ordered || profile.voltage_V <= 0.0) {
        throw std::invalid_argument("device profile '" + profile.name +
                                    "': expected tx >= rx >= idle >= sleep >= 0 and voltage > 0");
    }
}

TimeFractions victim_airtime(const AttackConfig& config, const PhyTiming& phy) {
    TimeFractions fractions;
    const bool flood_active =
        config.rate_mode == QueryRateMode::Saturate || config.query_rate_pps > 0.0;

    if (flood_active) {
        const auto response = response_kind_for(config.query_kind);
        const double cycle_us =
            exchange_cycle_us(config.query_kind, config.query_bitrate_mbps, phy);
        const double query_us = airtime_us(config.query_kind, config.query_bitrate_mbps, phy);
        const double response_us =
            airtime_us(*response,
                       response_bitrate_mbps(config.query_kind, config.query_bitrate_mbps), phy);
        double per_second = 1e6 / cycle_us;
        if (config.rate_mode == QueryRateMode::Fixed) {
            per_second = std::min(config.query_rate_pps, per_second);
        }
        fractions.rx = per_second * query_us / 1e6;
        fractions.tx = per_second * response_us / 1e6;
        fractions.idle = 1.0 - fractions.rx - fractions.tx;
    } else if (config.beacon_period_ns <= 0) {
        // No attack at all: the station's own schedule.
        const double beacon_us = airtime_us(FrameKind::beacon(), 1.0, phy);
        fractions.rx = beacon_us / kTbttUs;
        fractions.idle = kListenLeadUs / kTbttUs;
        fractions.sleep = 1.0 - fractions.rx - fractions.idle;
        return fractions;
    } else {
        fractions.idle = 1.0;
    }

    if (config.beacon_period_ns > 0) {
        const double beacon_us = airtime_us(FrameKind::beacon(), 1.0, phy);
        const double beacon_frac = beacon_us / ns_to_us(config.beacon_period_ns);
        const double shift = std::min(beacon_frac, fractions.idle);
        fractions.rx += shift;
        fractions.idle -= shift;
    }
    return fractions;
}

double drain_time_minutes(const BatterySpec& battery, double avg_power_W, double fraction) {
    if (avg_power_W <= 0.0) {
        throw std::invalid_argument("drain_time_minutes: average power must be positive");
    }
    if (fraction <= 0.0 || fraction > 1.0) {
        throw std::invalid_argument("drain_time_minutes: fraction must lie in (0, 1]");
    }
    return fraction * battery.capacity_Wh / avg_power_W * 60.0;
}

double average_power_w(const DeviceProfile& profile, const TimeFractions& fractions) {
    const double avg_mA = profile.sleep_mA * fractions.sleep + profile.idle_mA * fractions.idle +
                          profile.rx_mA * fractions.rx + profile.tx_mA * fractions.tx;
    return avg_mA * profile.voltage_V / 1000.0;
}

std::vector<RankedConfig> rank_configs(const DeviceProfile& device,
                                       const std::vector<AttackConfig>& configs,
                                       const PhyTiming& phy) {
    if (configs.empty()) {
        throw std::invalid_argument("rank_configs: at least one config required");
    }
    std::vector<RankedConfig> ranked;
    ranked.reserve(configs.size());
    for (const auto& config : configs) {
        ranked.push_back(RankedConfig{config, average_power_w(device, victim_airtime(config, phy))});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedConfig& a, const RankedConfig& b) {
        return a.avg_power_W > b.avg_power_W;
    });
    return ranked;
}

EnergyReport energy_report(const EnergyLedger& ledger, const DeviceProfile& profile) {
    EnergyReport report;
    const double elapsed = static_cast<double>(ledger.elapsed_ns());
    if (elapsed <= 0.0) return report;
    report.fractions.sleep = static_cast<double>(ledger.sleep_ns) / elapsed;
    report.fractions.idle = static_cast<double>(ledger.idle_ns) / elapsed;
    report.fractions.rx = static_cast<double>(ledger.rx_ns) / elapsed;
    report.fractions.tx = static_cast<double>(ledger.tx_ns) / elapsed;
    const double v = profile.voltage_V / 1000.0;
    report.sleep_W = profile.sleep_mA * report.fractions.sleep * v;
    report.idle_W = profile.idle_mA * report.fractions.idle * v;
    report.rx_W = profile.rx_mA * report.fractions.rx * v;
    report.tx_W = profile.tx_mA * report.fractions.tx * v;
    report.avg_power_W = report.sleep_W + report.idle_W + report.rx_W + report.tx_W;
    return report;
}

ProfileLibrary ProfileLibrary::builtin() {
    ProfileLibrary lib;
    lib.add(DeviceProfile{"esp32", 100.0, 240.0, 80.0, 0.05, 3.3});
    lib.add(DeviceProfile{"esp8266", 50.0, 170.0, 40.0, 0.02, 3.3});

    // Whole-device drain power fitted from the measured full-drain rows
    // (0.68 Wh / 14 min, 1.87 / 39, 4.20 / 90), expressed as a flat profile.
    const double fitted_w = (implied_drain_power_w(0.68, 14.0) + implied_drain_power_w(1.87, 39.0) +
                             implied_drain_power_w(4.20, 90.0)) /
                            3.0;
    const double fitted_mA = fitted_w / 3.3 * 1000.0;
    lib.add(DeviceProfile{"table4-fit", fitted_mA, fitted_mA, fitted_mA, 0.0, 3.3});

    // 6040 mAh camera pack, 3.65 V nominal, measured to empty in 36 h under
    // the saturating BAR/1 flood.
    const double ring_voltage = 3.65;
    const double ring_wh = 6.040 * ring_voltage;
    const double ring_mA = implied_drain_power_w(ring_wh, 36.0 * 60.0) / ring_voltage * 1000.0;
    lib.add(DeviceProfile{"ring-cam", ring_mA, ring_mA, ring_mA, 0.0, ring_voltage});

    lib.add(BatterySpec{"cr2032", 3.0, 0.68});
    lib.add(BatterySpec{"aaa", 1.5, 1.87});
    lib.add(BatterySpec{"aa", 1.5, 4.20});
    lib.add(BatterySpec{"ring-6040mah", ring_voltage, ring_wh});
    return lib;
}

void ProfileLibrary::add(DeviceProfile profile) {
    validate(profile);
    for (auto& existing : devices_) {
        if (existing.name == profile.name) {
            existing = std::move(profile);
            return;
        }
    }
    devices_.push_back(std::move(profile));
}

void ProfileLibrary::add(BatterySpec battery) {
    if (battery.capacity_Wh <= 0.0) {
        throw std::invalid_argument("battery '" + battery.name + "': capacity must be positive");
    }
    for (auto& existing : batteries_) {
        if (existing.name == battery.name) {
            existing = std::move(battery);
            return;
        }
    }
    batteries_.push_back(std::move(battery));
}

namespace {

[[noreturn]] void profile_error(const std::string& path, const std::string& message) {
    throw std::runtime_error("profile library " + path + ": " + message);
}

void check_keys(const nlohmann::json& object, const std::string& path,
                std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            profile_error(path, "unknown key '" + key + "' at " + where);
        }
    }
}

}  // namespace

void ProfileLibrary::merge_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) profile_error(path, "cannot open file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        profile_error(path, e.what());
    }
    if (!doc.is_object()) profile_error(path, "top level must be an object");
    check_keys(doc, path, {"schema", "devices", "batteries"}, "/");
    if (!doc.contains("schema") || doc["schema"] != 1) {
        profile_error(path, "missing or unsupported schema (expected 1)");
    }
    if (doc.contains("devices")) {
        std::size_t i = 0;
        for (const auto& entry : doc["devices"]) {
            const std::string where = "/devices/" + std::to_string(i++);
            check_keys(entry, path, {"name", "rx_mA", "tx_mA", "idle_mA", "sleep_mA", "voltage_V"},
                       where);
            try {
                add(DeviceProfile{entry.at("name").get<std::string>(),
                                  entry.at("rx_mA").get<double>(), entry.at("tx_mA").get<double>(),
                                  entry.at("idle_mA").get<double>(),
                                  entry.at("sleep_mA").get<double>(),
                                  entry.at("voltage_V").get<double>()});
            } catch (const std::exception& e) {
                profile_error(path, std::string(e.what()) + " at " + where);
            }
        }
    }
    if (doc.contains("batteries")) {
        std::size_t i = 0;
        for (const auto& entry : doc["batteries"]) {
            const std::string where = "/batteries/" + std::to_string(i++);
            check_keys(entry, path, {"name", "voltage_V", "capacity_Wh"}, where);
            try {
                add(BatterySpec{entry.at("name").get<std::string>(),
                                entry.at("voltage_V").get<double>(),
                                entry.at("capacity_Wh").get<double>()});
            } catch (const std::exception& e) {
                profile_error(path, std::string(e.what()) + " at " + where);
            }
        }
    }
}

namespace {

std::string join_names(const auto& items) {
    std::string joined;
    for (const auto& item : items) {
        if (!joined.empty()) joined += ", ";
        joined += item.name;
    }
    return joined;
}

}  // namespace

const DeviceProfile& ProfileLibrary::device(const std::string& name) const {
    for (const auto& profile : devices_) {
        if (profile.name == name) return profile;
    }
    throw std::out_of_range("unknown device '" + name + "'; available: " + join_names(devices_));
}

const BatterySpec& ProfileLibrary::battery(const std::string& name) const {
    for (const auto& battery : batteries_) {
        if (battery.name == name) return battery;
    }
    throw std::out_of_range("unknown battery '" + name + "'; available: " + join_names(batteries_));
}

}  // namespace wakesim
