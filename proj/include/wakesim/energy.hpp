// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wakesim/attacker.hpp"
#include "wakesim/station.hpp"

namespace wakesim {

/// Radio current profile. Fixed-power devices (whole-device drain fitted from
/// measurements rather than chipset datasheets) are expressed as flat
/// profiles: rx = tx = idle = P/V, sleep = 0.
struct DeviceProfile {
    std::string name;
    double rx_mA = 0.0;
    double tx_mA = 0.0;
    double idle_mA = 0.0;
    double sleep_mA = 0.0;
    double voltage_V = 3.3;
};

/// Throws std::invalid_argument unless tx >= rx >= idle >= sleep >= 0.
void validate(const DeviceProfile& profile);

struct BatterySpec {
    std::string name;
    double voltage_V = 0.0;
    double capacity_Wh = 0.0;
};

struct TimeFractions {
    double sleep = 0.0;
    double idle = 0.0;
    double rx = 0.0;
    double tx = 0.0;

    double sum() const { return sleep + idle + rx + tx; }
};

/// Victim time split under an attack config, per saturation exchange cycle:
/// rx = query airtime / cycle, tx = response airtime / cycle, idle the rest;
/// keep-awake beacons fold into rx at their configured period. A fixed query
/// rate assumes keep-awake is active (sleep 0); rate 0 with no beacons yields
/// the bare power-save schedule, which is sleep-dominated.
TimeFractions victim_airtime(const AttackConfig& config, const PhyTiming& phy);

/// fraction * capacity_Wh / avg_power_W * 60. Throws std::invalid_argument on
/// non-positive power or fraction outside (0, 1].
double drain_time_minutes(const BatterySpec& battery, double avg_power_W, double fraction);

double average_power_w(const DeviceProfile& profile, const TimeFractions& fractions);

struct RankedConfig {
    AttackConfig config;
    double avg_power_W;
};

/// Stable descending sort of attack configs by the average victim power they
/// induce on `device`.
std::vector<RankedConfig> rank_configs(const DeviceProfile& device,
                                       const std::vector<AttackConfig>& configs,
                                       const PhyTiming& phy);

struct EnergyReport {
    double avg_power_W = 0.0;
    TimeFractions fractions;
    double sleep_W = 0.0;
    double idle_W = 0.0;
    double rx_W = 0.0;
    double tx_W = 0.0;
};

/// Average device power over the ledger's accounted span.
EnergyReport energy_report(const EnergyLedger& ledger, const DeviceProfile& profile);

inline EnergyReport energy_report(const StationState& station, const DeviceProfile& profile) {
    return energy_report(station.ledger, profile);
}

struct DrainReport {
    std::string device;
    std::string battery;
    double fraction = 1.0;
    double avg_power_W = 0.0;
    TimeFractions fractions;
    double minutes = 0.0;
};

/// Named device/battery collection, extendable from a JSON data file.
class ProfileLibrary {
public:
    static ProfileLibrary builtin();

    /// Loads {"schema": 1, "devices": [...], "batteries": [...]} and merges it
    /// over this library (same name overrides). Throws std::runtime_error with
    /// the offending path on schema violations.
    void merge_json_file(const std::string& path);

    /// Throws std::out_of_range listing the available names.
    const DeviceProfile& device(const std::string& name) const;
    const BatterySpec& battery(const std::string& name) const;

    const std::vector<DeviceProfile>& devices() const { return devices_; }
    const std::vector<BatterySpec>& batteries() const { return batteries_; }

    void add(DeviceProfile profile);
    void add(BatterySpec battery);

private:
    std::vector<DeviceProfile> devices_;
    std::vector<BatterySpec> batteries_;
};

/// Whole-device drain power implied by a measured full-drain row:
/// capacity_Wh / (minutes / 60).
inline double implied_drain_power_w(double capacity_Wh, double full_drain_minutes) {
    return capacity_Wh / (full_drain_minutes / 60.0);
}

}  // namespace wakesim
