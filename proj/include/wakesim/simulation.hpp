// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wakesim/scenario.hpp"

namespace wakesim {

/// One transmission as it went on the air. `delivered` reflects the lossy
/// attacker link draw; frames between in-network stations always deliver.
struct TraceRecord {
    SimTime at_ns;
    Frame frame;
    bool delivered;
};

struct StationReport {
    MacAddress mac;
    EnergyLedger ledger;
    std::string device_profile;
    double awake_fraction = 0.0;
    std::uint64_t frames_received = 0;
    std::uint64_t responses_sent = 0;
    std::uint64_t malformed_beacons = 0;
    std::vector<MacAddress> blacklisted;
};

/// Awake-state step function, one row per transition (plus the t=0 state).
struct AwakeSample {
    SimTime at_ns;
    MacAddress mac;
    bool awake;
};

struct SimResult {
    std::vector<TraceRecord> events;
    std::vector<StationReport> stations;  // scenario order
    std::vector<AwakeSample> awake_timeline;
    std::uint64_t attacker_queries_sent = 0;
    std::uint64_t attacker_replies_heard = 0;
    std::vector<std::string> warnings;

    double reply_fraction() const {
        return attacker_queries_sent == 0
                   ? 0.0
                   : static_cast<double>(attacker_replies_heard) /
                         static_cast<double>(attacker_queries_sent);
    }
    const StationReport& station(const MacAddress& mac) const;
};

/// Runs the scenario's event loop to duration_s. Deterministic: one seeded
/// RNG, tie-broken event order, stable report ordering.
SimResult run_scenario(const Scenario& scenario);

void write_events_csv(const SimResult& result, std::ostream& out);
void write_timeline_csv(const SimResult& result, std::ostream& out);
void write_ledgers_json(const SimResult& result, std::ostream& out);

}  // namespace wakesim
