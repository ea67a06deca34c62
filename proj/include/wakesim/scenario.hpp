// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wakesim/attacker.hpp"
#include "wakesim/csi.hpp"
#include "wakesim/medium.hpp"
#include "wakesim/station.hpp"

namespace wakesim {

/// One full simulation description, loaded from a JSON file with a versioned
/// "schema": 1 field. Unknown keys are rejected.
struct Scenario {
    std::uint64_t seed = 1;
    double duration_s = 10.0;
    PhyTiming phy;
    ReplyRateTable reply_table = ReplyRateTable::default_table();
    double attacker_distance_m = 5.0;
    SimTime ap_beacon_offset_ns = 2'000'000;  // beacon lag after each TBTT
    std::vector<StationConfig> stations;
    std::optional<AttackConfig> attack;
    std::optional<BreathScenario> breath;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Throws ScenarioError naming the offending field (JSON-pointer style) or
/// the parse position for malformed JSON.
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario(std::istream& in, const std::string& origin);

}  // namespace wakesim
