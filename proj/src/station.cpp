// SPDX-License-Identifier: Apache-2.0
#include "wakesim/station.hpp"

#include <stdexcept>
#include <utility>

namespace wakesim {

void EnergyLedger::advance(SimTime now, bool asleep) {
    if (now <= accounted_until_ns) return;
    (asleep ? sleep_ns : idle_ns) += now - accounted_until_ns;
    accounted_until_ns = now;
}

void EnergyLedger::book_rx(SimTime start, SimTime duration, bool asleep_before) {
    advance(start, asleep_before);
    const SimTime end = start + duration;
    if (end > accounted_until_ns) {
        rx_ns += end - accounted_until_ns;
        accounted_until_ns = end;
    }
}

void EnergyLedger::book_tx(SimTime start, SimTime duration, bool asleep_before) {
    advance(start, asleep_before);
    const SimTime end = start + duration;
    if (end > accounted_until_ns) {
        tx_ns += end - accounted_until_ns;
        accounted_until_ns = end;
    }
}

StationState::StationState(StationConfig config) : cfg(std::move(config)) {
    if (cfg.is_ap || cfg.always_awake) {
        power.mode = PowerMode::Awake;  // indefinite
    } else {
        power.mode = PowerMode::AwaitingBeacon;  // fresh TBTT at t = 0
        next_listen_ns = cfg.beacon_listen_interval_ns;
    }
}

FrameActions on_frame(StationState& st, const Frame& frame, SimTime now, const PhyTiming& phy) {
    FrameActions actions;
    const bool was_asleep = st.asleep();
    const SimTime rx_dur = us_to_ns(airtime_us(frame.kind, frame.bitrate_mbps, phy));
    st.ledger.book_rx(now, rx_dur, was_asleep);

    const auto response_kind = response_for(frame, st.cfg.mac);
    SimTime next_tx_at = now + rx_dur + us_to_ns(phy.sifs_us);
    if (response_kind) {
        Frame response = make_query(*response_kind, st.cfg.mac, frame.src,
                                    response_bitrate_mbps(frame.kind, frame.bitrate_mbps));
        const SimTime tx_dur = us_to_ns(airtime_us(response.kind, response.bitrate_mbps, phy));
        st.ledger.book_tx(next_tx_at, tx_dur, false);
        actions.response = ScheduledFrame{next_tx_at, std::move(response)};
        next_tx_at += tx_dur + us_to_ns(phy.sifs_us);
    }

    const bool addressed_here = !frame.dst.is_broadcast() && frame.dst == st.cfg.mac;
    if (st.cfg.is_ap && st.cfg.deauth_on_fake && addressed_here &&
        !st.associated_clients.contains(frame.src) && frame.src != st.cfg.mac) {
        Frame deauth = make_query(FrameKind::deauth(), st.cfg.mac, frame.src, frame.bitrate_mbps);
        const SimTime tx_dur = us_to_ns(airtime_us(deauth.kind, deauth.bitrate_mbps, phy));
        st.ledger.book_tx(next_tx_at, tx_dur, false);
        actions.deauth = ScheduledFrame{next_tx_at, std::move(deauth)};
    }
    return actions;
}

std::optional<ScheduledFrame> on_beacon(StationState& st, const Frame& beacon, SimTime now,
                                        const PhyTiming& phy) {
    if (beacon.kind.type != FrameType::Beacon) {
        throw std::invalid_argument("on_beacon: frame is not a beacon");
    }
    const bool was_asleep = st.asleep();
    const SimTime rx_dur = us_to_ns(airtime_us(beacon.kind, beacon.bitrate_mbps, phy));
    st.ledger.book_rx(now, rx_dur, was_asleep);

    if (st.disconnected_from.contains(beacon.src)) return std::nullopt;
    if (st.cfg.is_ap) return std::nullopt;  // APs do not follow TIM bits

    bool notified = false;
    if (!beacon.tim) {
        ++st.malformed_beacons;
        return std::nullopt;
    }
    try {
        notified = tim_bit(*beacon.tim, st.cfg.aid);
    } catch (const std::out_of_range&) {
        ++st.malformed_beacons;  // TIM too short for our aid
        return std::nullopt;
    }

    if (!notified) {
        // Only a station still waiting on the TBTT beacon goes back to sleep;
        // an Awake station keeps its own timer.
        if (st.power.mode == PowerMode::AwaitingBeacon) {
            st.power.mode = PowerMode::Asleep;
            st.power.awake_until_ns.reset();
        }
        return std::nullopt;
    }

    const SimTime rx_end = now + rx_dur;
    st.power.mode = PowerMode::Awake;
    if (!st.cfg.is_ap && !st.cfg.always_awake) {
        st.power.awake_until_ns = rx_end + st.cfg.awake_timeout_ns;
    }

    Frame reply = make_null_function(st.cfg.mac, beacon.src, /*pm_bit=*/false, st.cfg.aid,
                                     beacon.bitrate_mbps);
    const SimTime tx_at = rx_end + us_to_ns(phy.sifs_us);
    const SimTime tx_dur = us_to_ns(airtime_us(reply.kind, reply.bitrate_mbps, phy));
    st.ledger.book_tx(tx_at, tx_dur, false);
    return ScheduledFrame{tx_at, std::move(reply)};
}

void suspicion_check(StationState& st, const MacAddress& beacon_src, SimTime now) {
    if (beacon_src == st.cfg.ap_mac) return;  // the legitimate AP is exempt
    if (st.disconnected_from.contains(beacon_src)) return;
    auto& history = st.beacon_history[beacon_src];
    const SimTime horizon = now - st.cfg.suspicion.window_ns;
    while (!history.empty() && history.front() < horizon) history.pop_front();
    history.push_back(now);
    if (static_cast<int>(history.size()) > st.cfg.suspicion.threshold) {
        st.disconnected_from.insert(beacon_src);
        st.beacon_history.erase(beacon_src);
    }
}

SimTime tick_sleep_schedule(StationState& st, SimTime now) {
    if (st.power.mode == PowerMode::Awake) {
        return st.power.awake_until_ns.value_or(now);
    }
    while (st.next_listen_ns <= now) {
        st.next_listen_ns += st.cfg.beacon_listen_interval_ns;
    }
    return st.next_listen_ns;
}

}  // namespace wakesim
