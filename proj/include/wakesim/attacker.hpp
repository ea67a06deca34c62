// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wakesim/frames.hpp"
#include "wakesim/medium.hpp"

namespace wakesim {

enum class QueryRateMode : std::uint8_t {
    Saturate,  // back-to-back at the exchange-cycle rate
    Fixed,     // query_rate_pps queries per second
};

enum class BeaconDelivery : std::uint8_t { Unicast, Broadcast };

struct AttackConfig {
    FrameKind query_kind = FrameKind::bar();
    double query_bitrate_mbps = 1.0;
    QueryRateMode rate_mode = QueryRateMode::Saturate;
    double query_rate_pps = 0.0;  // Fixed mode; 0 disables the query flood
    SimTime beacon_period_ns = 0;  // 0 = no forged beacons
    SimTime beacon_start_offset_ns = 1'000'000;  // phase-aligned just after a TBTT
    BeaconDelivery beacon_delivery = BeaconDelivery::Unicast;
    MacAddress attacker_mac;  // spoofed source of query frames
    MacAddress target;
    MacAddress spoofed_ap_mac;
    std::string spoofed_ssid;
    std::optional<std::uint16_t> target_aid;  // unknown -> TIM all-set
};

struct DiscoveredClient {
    MacAddress mac;
    std::optional<std::uint16_t> aid;
};

struct DiscoveryResult {
    MacAddress ap_mac;
    std::string ssid;
    std::vector<DiscoveredClient> clients;
};

/// Harvests the AP identity from observed beacons and client MACs/aids from
/// null-function replies (plus, passively, any frame a client sends to the
/// AP). Throws std::runtime_error when the stream holds no beacon.
DiscoveryResult discover_targets(std::span<const Frame> sniffed);

/// Immutable attack schedule, consumed by the event loop.
struct AttackPlan {
    Frame query_template;
    std::optional<Frame> beacon_template;
    SimTime query_interval_ns = 0;  // 0 = no queries
    SimTime beacon_period_ns = 0;   // 0 = no beacons
    SimTime beacon_start_offset_ns = 0;
    double expected_queries_per_s = 0.0;
    std::vector<std::string> warnings;

    /// Expands the periodic schedule over [t_begin, t_end), queries and
    /// beacons interleaved in time order.
    std::vector<ScheduledFrame> materialize(SimTime t_begin, SimTime t_end) const;
};

/// Interleaved keep-awake schedule: queries at the configured rate plus one
/// forged beacon (TIM bit set for the target aid, or all-set when unknown,
/// src = the spoofed AP) every beacon period. Requires beacon_period_ns > 0.
/// A beacon rate at or above the suspicion threshold gets a warning
/// diagnostic -- the attack would blacklist itself.
AttackPlan plan_keep_awake(const AttackConfig& config, const PhyTiming& phy,
                           double suspicion_threshold_per_s = 20.0);

/// Back-to-back query flood at the saturation rate 1/exchange_cycle.
/// Throws std::invalid_argument when the query kind elicits no response.
AttackPlan plan_query_flood(FrameKind query_kind, double bitrate_mbps, const PhyTiming& phy);

}  // namespace wakesim
