// SPDX-License-Identifier: Apache-2.0
#include "wakesim/attacker.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace wakesim {

DiscoveryResult discover_targets(std::span<const Frame> sniffed) {
    DiscoveryResult result;
    bool ap_found = false;
    for (const Frame& frame : sniffed) {
        if (frame.kind.type == FrameType::Beacon) {
            result.ap_mac = frame.src;
            result.ssid = frame.ssid.value_or("");
            ap_found = true;
            break;
        }
    }
    if (!ap_found) {
        throw std::runtime_error("discover_targets: no beacon observed, discovery failed");
    }

    std::map<MacAddress, std::optional<std::uint16_t>> clients;
    for (const Frame& frame : sniffed) {
        if (frame.src == result.ap_mac || frame.src.is_broadcast()) continue;
        if (frame.kind.type == FrameType::NullFunction) {
            auto& aid = clients[frame.src];
            if (frame.aid) aid = frame.aid;
        } else if (frame.dst == result.ap_mac) {
            clients.try_emplace(frame.src, std::nullopt);
        }
    }
    for (const auto& [mac, aid] : clients) {
        result.clients.push_back(DiscoveredClient{mac, aid});
    }
    return result;
}

std::vector<ScheduledFrame> AttackPlan::materialize(SimTime t_begin, SimTime t_end) const {
    std::vector<ScheduledFrame> schedule;
    if (query_interval_ns > 0) {
        for (SimTime t = t_begin; t < t_end; t += query_interval_ns) {
            schedule.push_back(ScheduledFrame{t, query_template});
        }
    }
    if (beacon_period_ns > 0 && beacon_template) {
        for (SimTime t = t_begin + beacon_start_offset_ns; t < t_end; t += beacon_period_ns) {
            schedule.push_back(ScheduledFrame{t, *beacon_template});
        }
    }
    std::stable_sort(schedule.begin(), schedule.end(),
                     [](const ScheduledFrame& a, const ScheduledFrame& b) { return a.at_ns < b.at_ns; });
    return schedule;
}

namespace {

Frame forged_beacon(const AttackConfig& config) {
    TimBitmap tim = config.target_aid ? encode_tim({*config.target_aid}) : TimBitmap::all_set();
    const MacAddress dst = config.beacon_delivery == BeaconDelivery::Unicast
                               ? config.target
                               : MacAddress::broadcast();
    return make_beacon(config.spoofed_ap_mac, dst, config.spoofed_ssid, std::move(tim));
}

}  // namespace

AttackPlan plan_keep_awake(const AttackConfig& config, const PhyTiming& phy,
                           double suspicion_threshold_per_s) {
    if (config.beacon_period_ns <= 0) {
        throw std::invalid_argument("plan_keep_awake: beacon period must be positive");
    }
    AttackPlan plan;
    plan.query_template =
        make_query(config.query_kind, config.attacker_mac, config.target, config.query_bitrate_mbps);
    plan.beacon_template = forged_beacon(config);
    plan.beacon_period_ns = config.beacon_period_ns;
    plan.beacon_start_offset_ns = config.beacon_start_offset_ns;

    if (config.rate_mode == QueryRateMode::Saturate) {
        const double cycle_us = exchange_cycle_us(config.query_kind, config.query_bitrate_mbps, phy);
        plan.query_interval_ns = us_to_ns(cycle_us);
        plan.expected_queries_per_s = 1e6 / cycle_us;
    } else if (config.query_rate_pps > 0.0) {
        plan.query_interval_ns = seconds_to_ns(1.0 / config.query_rate_pps);
        plan.expected_queries_per_s = config.query_rate_pps;
    }

    const double beacon_rate = 1e9 / static_cast<double>(config.beacon_period_ns);
    if (beacon_rate >= suspicion_threshold_per_s) {
        plan.warnings.push_back(
            "forged-beacon rate " + std::to_string(beacon_rate) + "/s reaches the suspicion threshold " +
            std::to_string(suspicion_threshold_per_s) + "/s; the target will blacklist the attack");
    }
    return plan;
}

AttackPlan plan_query_flood(FrameKind query_kind, double bitrate_mbps, const PhyTiming& phy) {
    const double cycle_us = exchange_cycle_us(query_kind, bitrate_mbps, phy);  // throws on no-response kinds
    AttackPlan plan;
    MacAddress fake_src = MacAddress::parse("aa:bb:bb:bb:bb:bb");
    plan.query_template = make_query(query_kind, fake_src, MacAddress{}, bitrate_mbps);
    plan.query_interval_ns = us_to_ns(cycle_us);
    plan.expected_queries_per_s = 1e6 / cycle_us;
    return plan;
}

}  // namespace wakesim
