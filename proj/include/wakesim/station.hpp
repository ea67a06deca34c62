// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "wakesim/frames.hpp"
#include "wakesim/medium.hpp"

namespace wakesim {

enum class PowerMode : std::uint8_t {
    Asleep,          // radio off; nothing is received
    AwaitingBeacon,  // listening for the TBTT beacon
    Awake,           // active until the timeout (or indefinitely)
};

struct PowerState {
    PowerMode mode = PowerMode::Asleep;
    std::optional<SimTime> awake_until_ns;  // nullopt while Awake means indefinite

    bool receiving() const { return mode != PowerMode::Asleep; }
};

/// Time spent per radio state, integer nanoseconds. The four buckets always
/// sum to exactly the accounted span.
struct EnergyLedger {
    SimTime sleep_ns = 0;
    SimTime idle_ns = 0;
    SimTime rx_ns = 0;
    SimTime tx_ns = 0;
    SimTime accounted_until_ns = 0;

    SimTime elapsed_ns() const { return sleep_ns + idle_ns + rx_ns + tx_ns; }

    /// Books the gap up to `now` as sleep or idle-awake.
    void advance(SimTime now, bool asleep);
    /// Books [start, start+duration) as rx/tx, trimming any overlap with time
    /// already accounted (overlapping receptions are not double-billed).
    void book_rx(SimTime start, SimTime duration, bool asleep_before);
    void book_tx(SimTime start, SimTime duration, bool asleep_before);
};

struct SuspicionConfig {
    int threshold = 20;                     // beacons per window before blacklisting
    SimTime window_ns = 1'000'000'000;      // 1 s
};

struct StationConfig {
    MacAddress mac;
    std::uint16_t aid = 0;
    MacAddress ap_mac;
    std::string ssid;
    SimTime beacon_listen_interval_ns = 102'400'000;  // 102.4 ms TBTT
    SimTime awake_timeout_ns = 500'000'000;           // dwell after a TIM hit
    SimTime listen_window_ns = 10'000'000;            // max AwaitingBeacon dwell
    SuspicionConfig suspicion;
    bool is_ap = false;
    bool deauth_on_fake = false;
    bool always_awake = false;
    std::string device_profile = "esp32";  // current profile for energy reports
};

/// Victim-device state. One simulation owns each instance.
struct StationState {
    StationConfig cfg;
    PowerState power;
    EnergyLedger ledger;
    std::set<MacAddress> disconnected_from;
    std::set<MacAddress> associated_clients;  // AP side, for the deauth heuristic
    std::uint64_t malformed_beacons = 0;
    SimTime next_listen_ns = 0;

    explicit StationState(StationConfig config);

    bool asleep() const { return power.mode == PowerMode::Asleep; }
    /// Books pending sleep/idle time up to `now`.
    void account(SimTime now) { ledger.advance(now, asleep()); }

    std::map<MacAddress, std::deque<SimTime>> beacon_history;
};

struct FrameActions {
    std::optional<ScheduledFrame> response;
    std::optional<ScheduledFrame> deauth;
};

/// Processes one received non-beacon frame at `now` (arrival start). The
/// caller guarantees the station is not asleep. The response is emitted SIFS
/// after reception ends whenever the destination matches, no matter what the
/// source is, whether it was deauthed before, or whether the payload means
/// anything. A deauth-on-fake AP additionally queues a deauthentication to
/// unassociated sources -- and still acknowledges them.
FrameActions on_frame(StationState& st, const Frame& frame, SimTime now, const PhyTiming& phy);

/// Processes one received beacon. A set TIM bit for this station's aid makes
/// it go (or stay) Awake and answer with a null-function frame, pm=0; a clear
/// bit sends an AwaitingBeacon station back to sleep (an Awake station keeps
/// its timer -- it announced itself awake and sleeps on its own schedule).
/// Unicast and broadcast beacons are handled identically. Beacons without a
/// TIM are counted in malformed_beacons and otherwise ignored, as are beacons
/// from blacklisted sources.
std::optional<ScheduledFrame> on_beacon(StationState& st, const Frame& beacon, SimTime now,
                                        const PhyTiming& phy);

/// Sliding-window beacon-rate check, run on every received beacon before
/// on_beacon. Sources exceeding the threshold are blacklisted; the station's
/// own AP is exempt. Blacklisting only suppresses beacon power-save
/// processing, never acknowledgments.
void suspicion_check(StationState& st, const MacAddress& beacon_src, SimTime now);

/// Next beacon-listen instant for a sleeping station (previous + listen
/// interval). For an Awake station returns the current awake deadline.
SimTime tick_sleep_schedule(StationState& st, SimTime now);

}  // namespace wakesim
