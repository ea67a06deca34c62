// SPDX-License-Identifier: Apache-2.0
#include "wakesim/simulation.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "wakesim/energy.hpp"

namespace wakesim {

namespace {

class Simulation {
public:
    explicit Simulation(const Scenario& scenario) : sc_(scenario), rng_(scenario.seed) {
        horizon_ns_ = seconds_to_ns(sc_.duration_s);
        for (const auto& cfg : sc_.stations) {
            stations_.emplace_back(cfg);
            epochs_.push_back(0);
            by_mac_.emplace(cfg.mac, stations_.size() - 1);
        }
        frames_received_.assign(stations_.size(), 0);
        responses_sent_.assign(stations_.size(), 0);
        // AP-side association bookkeeping for the deauth heuristic.
        for (auto& ap : stations_) {
            if (!ap.cfg.is_ap) continue;
            for (const auto& client : stations_) {
                if (!client.cfg.is_ap && client.cfg.ap_mac == ap.cfg.mac) {
                    ap.associated_clients.insert(client.cfg.mac);
                }
            }
        }
    }

    SimResult run() {
        for (std::size_t i = 0; i < stations_.size(); ++i) {
            record_awake(0, stations_[i].cfg.mac, !stations_[i].asleep());
            if (stations_[i].cfg.is_ap) {
                schedule_ap_beacon(i, sc_.ap_beacon_offset_ns);
            } else if (!stations_[i].cfg.always_awake) {
                // Fresh TBTT at t = 0: the station is listening.
                schedule_await_timeout(i, stations_[i].cfg.listen_window_ns);
            }
        }
        if (sc_.attack) start_attack();

        queue_.run_until(horizon_ns_);

        SimResult result = std::move(result_);
        for (std::size_t i = 0; i < stations_.size(); ++i) {
            auto& st = stations_[i];
            st.account(horizon_ns_);
            StationReport report;
            report.mac = st.cfg.mac;
            report.ledger = st.ledger;
            const double elapsed = static_cast<double>(st.ledger.elapsed_ns());
            report.awake_fraction =
                elapsed > 0.0 ? 1.0 - static_cast<double>(st.ledger.sleep_ns) / elapsed : 0.0;
            report.frames_received = frames_received_[i];
            report.responses_sent = responses_sent_[i];
            report.malformed_beacons = st.malformed_beacons;
            report.device_profile = st.cfg.device_profile;
            report.blacklisted.assign(st.disconnected_from.begin(), st.disconnected_from.end());
            result.stations.push_back(std::move(report));
        }
        return result;
    }

private:
    // --- bookkeeping ---------------------------------------------------

    void record_awake(SimTime at, const MacAddress& mac, bool awake) {
        result_.awake_timeline.push_back(AwakeSample{at, mac, awake});
    }

    void note_transition(std::size_t i, bool was_awake) {
        auto& st = stations_[i];
        ++epochs_[i];
        const bool awake = !st.asleep();
        if (awake != was_awake) record_awake(queue_.now(), st.cfg.mac, awake);
    }

    void record_frame(SimTime at, const Frame& frame, bool delivered) {
        result_.events.push_back(TraceRecord{at, frame, delivered});
    }

    // --- power-save machinery -------------------------------------------

    void go_asleep(std::size_t i) {
        auto& st = stations_[i];
        const bool was_awake = !st.asleep();
        st.account(queue_.now());
        st.power.mode = PowerMode::Asleep;
        st.power.awake_until_ns.reset();
        note_transition(i, was_awake);
        const SimTime next_listen = tick_sleep_schedule(st, queue_.now());
        if (next_listen < horizon_ns_) schedule_listen(i, next_listen);
    }

    void schedule_listen(std::size_t i, SimTime at) {
        const std::uint64_t epoch = epochs_[i];
        queue_.schedule_at(at, [this, i, epoch] {
            auto& st = stations_[i];
            if (epochs_[i] != epoch || st.power.mode != PowerMode::Asleep) return;
            const bool was_awake = false;
            st.account(queue_.now());
            st.power.mode = PowerMode::AwaitingBeacon;
            note_transition(i, was_awake);
            schedule_await_timeout(i, queue_.now() + st.cfg.listen_window_ns);
        });
    }

    void schedule_await_timeout(std::size_t i, SimTime at) {
        const std::uint64_t epoch = epochs_[i];
        queue_.schedule_at(at, [this, i, epoch] {
            if (epochs_[i] != epoch) return;
            if (stations_[i].power.mode == PowerMode::AwaitingBeacon) go_asleep(i);
        });
    }

    void schedule_awake_expiry(std::size_t i, SimTime at) {
        const std::uint64_t epoch = epochs_[i];
        queue_.schedule_at(at, [this, i, epoch] {
            if (epochs_[i] != epoch) return;
            auto& st = stations_[i];
            if (st.power.mode == PowerMode::Awake && st.power.awake_until_ns &&
                *st.power.awake_until_ns <= queue_.now()) {
                go_asleep(i);
            }
        });
    }

    // --- frame handling --------------------------------------------------

    void station_receive(std::size_t i, const Frame& frame) {
        auto& st = stations_[i];
        if (st.asleep()) return;
        ++frames_received_[i];
        const SimTime now = queue_.now();

        if (frame.kind.type == FrameType::Beacon) {
            const bool was_awake = !st.asleep();
            suspicion_check(st, frame.src, now);
            const auto before = st.power.mode;
            const auto reply = on_beacon(st, frame, now, sc_.phy);
            if (st.power.mode != before) note_transition(i, was_awake);
            if (st.power.mode == PowerMode::Awake && st.power.awake_until_ns) {
                schedule_awake_expiry(i, *st.power.awake_until_ns);
            } else if (st.power.mode == PowerMode::Asleep) {
                // TIM said nothing buffered: back onto the TBTT schedule.
                const SimTime next_listen = tick_sleep_schedule(st, now);
                if (next_listen < horizon_ns_) schedule_listen(i, next_listen);
            }
            if (reply) emit_station_frame(i, *reply);
            return;
        }

        const FrameActions actions = on_frame(st, frame, now, sc_.phy);
        if (actions.response) emit_station_frame(i, *actions.response);
        if (actions.deauth) emit_station_frame(i, *actions.deauth);
    }

    void emit_station_frame(std::size_t i, const ScheduledFrame& scheduled) {
        ++responses_sent_[i];
        queue_.schedule_at(scheduled.at_ns, [this, frame = scheduled.frame] {
            const bool to_attacker = sc_.attack && frame.dst == sc_.attack->attacker_mac;
            record_frame(queue_.now(), frame, true);
            if (to_attacker) return;  // the attacker only sniffs
            deliver_in_network(frame);
        });
    }

    void deliver_in_network(const Frame& frame) {
        if (frame.dst.is_broadcast()) {
            for (std::size_t i = 0; i < stations_.size(); ++i) {
                if (stations_[i].cfg.mac != frame.src) station_receive(i, frame);
            }
            return;
        }
        const auto it = by_mac_.find(frame.dst);
        if (it != by_mac_.end()) station_receive(it->second, frame);
    }

    // --- the legitimate AP ----------------------------------------------

    void schedule_ap_beacon(std::size_t i, SimTime at) {
        if (at >= horizon_ns_) return;
        queue_.schedule_at(at, [this, i] {
            auto& ap = stations_[i];
            Frame beacon = make_beacon(ap.cfg.mac, MacAddress::broadcast(), ap.cfg.ssid,
                                       TimBitmap(256));  // no buffered traffic modeled
            const SimTime air = us_to_ns(airtime_us(beacon.kind, beacon.bitrate_mbps, sc_.phy));
            ap.ledger.book_tx(queue_.now(), air, false);
            record_frame(queue_.now(), beacon, true);
            deliver_in_network(beacon);
            schedule_ap_beacon(i, queue_.now() + ap.cfg.beacon_listen_interval_ns);
        });
    }

    // --- the attacker ----------------------------------------------------

    void start_attack() {
        const AttackConfig& attack = *sc_.attack;
        if (attack.beacon_period_ns > 0) {
            plan_ = plan_keep_awake(attack, sc_.phy, suspicion_threshold_per_s());
        } else {
            plan_ = AttackPlan{};
            plan_->query_template = make_query(attack.query_kind, attack.attacker_mac,
                                               attack.target, attack.query_bitrate_mbps);
            if (attack.rate_mode == QueryRateMode::Saturate) {
                const double cycle_us =
                    exchange_cycle_us(attack.query_kind, attack.query_bitrate_mbps, sc_.phy);
                plan_->query_interval_ns = us_to_ns(cycle_us);
                plan_->expected_queries_per_s = 1e6 / cycle_us;
            } else if (attack.query_rate_pps > 0.0) {
                plan_->query_interval_ns = seconds_to_ns(1.0 / attack.query_rate_pps);
                plan_->expected_queries_per_s = attack.query_rate_pps;
            }
        }
        result_.warnings = plan_->warnings;

        if (plan_->query_interval_ns > 0) {
            schedule_attacker_query(us_to_ns(sc_.phy.difs_us) + sample_backoff_ns());
        }
        if (plan_->beacon_period_ns > 0) {
            schedule_attacker_beacon(plan_->beacon_start_offset_ns);
        }
    }

    double suspicion_threshold_per_s() const {
        const auto it = by_mac_.find(sc_.attack->target);
        if (it == by_mac_.end()) return 20.0;
        const auto& cfg = stations_[it->second].cfg;
        return cfg.suspicion.threshold /
               (static_cast<double>(cfg.suspicion.window_ns) * 1e-9);
    }

    SimTime sample_backoff_ns() {
        std::uniform_int_distribution<int> slots(0, sc_.phy.cw_min);
        return us_to_ns(static_cast<double>(slots(rng_)) * sc_.phy.slot_us);
    }

    void schedule_attacker_query(SimTime at) {
        if (at >= horizon_ns_) return;
        queue_.schedule_at(at, [this] {
            const AttackConfig& attack = *sc_.attack;
            const Frame& query = plan_->query_template;
            ++result_.attacker_queries_sent;

            // One Bernoulli draw covers the whole exchange (query heard and
            // response observed).
            const bool delivered = deliver(sc_.attacker_distance_m, sc_.reply_table, rng_);
            record_frame(queue_.now(), query, delivered);

            const auto it = by_mac_.find(query.dst);
            if (delivered && it != by_mac_.end()) {
                const std::size_t idx = it->second;
                const std::uint64_t responses_before = responses_sent_[idx];
                station_receive(idx, query);
                if (responses_sent_[idx] > responses_before) ++result_.attacker_replies_heard;
            }

            // Saturation pacing: the attacker re-contends after the response
            // slot whether or not anything came back (timeout has the same
            // length as the expected response).
            SimTime next;
            if (attack.rate_mode == QueryRateMode::Saturate) {
                const double query_air = airtime_us(query.kind, query.bitrate_mbps, sc_.phy);
                const auto response = response_kind_for(query.kind);
                const double response_air = airtime_us(
                    *response, response_bitrate_mbps(query.kind, query.bitrate_mbps), sc_.phy);
                next = queue_.now() + us_to_ns(query_air + sc_.phy.sifs_us + response_air +
                                               sc_.phy.difs_us) +
                       sample_backoff_ns();
            } else {
                next = queue_.now() + plan_->query_interval_ns;
            }
            schedule_attacker_query(next);
        });
    }

    void schedule_attacker_beacon(SimTime at) {
        if (at >= horizon_ns_) return;
        queue_.schedule_at(at, [this] {
            const Frame& beacon = *plan_->beacon_template;
            const bool delivered = deliver(sc_.attacker_distance_m, sc_.reply_table, rng_);
            record_frame(queue_.now(), beacon, delivered);
            if (delivered) {
                if (beacon.dst.is_broadcast()) {
                    deliver_in_network(beacon);
                } else {
                    const auto it = by_mac_.find(beacon.dst);
                    if (it != by_mac_.end()) station_receive(it->second, beacon);
                }
            }
            schedule_attacker_beacon(queue_.now() + plan_->beacon_period_ns);
        });
    }

    // --- members ----------------------------------------------------------

    const Scenario& sc_;
    EventQueue queue_;
    Rng rng_;
    SimTime horizon_ns_ = 0;
    std::vector<StationState> stations_;
    std::vector<std::uint64_t> epochs_;
    std::map<MacAddress, std::size_t> by_mac_;
    std::vector<std::uint64_t> frames_received_;
    std::vector<std::uint64_t> responses_sent_;
    std::optional<AttackPlan> plan_;
    SimResult result_;
};

}  // namespace

const StationReport& SimResult::station(const MacAddress& mac) const {
    for (const auto& report : stations) {
        if (report.mac == mac) return report;
    }
    throw std::out_of_range("no station report for " + mac.to_string());
}

SimResult run_scenario(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

namespace {

std::string format_us(SimTime ns) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", ns_to_us(ns));
    return buf;
}

}  // namespace

void write_events_csv(const SimResult& result, std::ostream& out) {
    out << "time_us,kind,src,dst,bitrate_mbps,size_bytes,delivered\n";
    char rate[32];
    for (const auto& record : result.events) {
        std::snprintf(rate, sizeof(rate), "%g", record.frame.bitrate_mbps);
        out << format_us(record.at_ns) << ',' << frame_type_name(record.frame.kind.type) << ','
            << record.frame.src.to_string() << ',' << record.frame.dst.to_string() << ',' << rate
            << ',' << frame_size_bytes(record.frame.kind) << ',' << (record.delivered ? 1 : 0)
            << "\n";
    }
}

void write_timeline_csv(const SimResult& result, std::ostream& out) {
    out << "time_us,station,awake\n";
    for (const auto& sample : result.awake_timeline) {
        out << format_us(sample.at_ns) << ',' << sample.mac.to_string() << ','
            << (sample.awake ? 1 : 0) << "\n";
    }
}

void write_ledgers_json(const SimResult& result, std::ostream& out) {
    const ProfileLibrary library = ProfileLibrary::builtin();
    nlohmann::json doc;
    doc["stations"] = nlohmann::json::array();
    for (const auto& report : result.stations) {
        nlohmann::json entry;
        entry["mac"] = report.mac.to_string();
        entry["sleep_s"] = ns_to_s(report.ledger.sleep_ns);
        entry["idle_s"] = ns_to_s(report.ledger.idle_ns);
        entry["rx_s"] = ns_to_s(report.ledger.rx_ns);
        entry["tx_s"] = ns_to_s(report.ledger.tx_ns);
        entry["awake_fraction"] = report.awake_fraction;
        for (const auto& device : library.devices()) {
            if (device.name == report.device_profile) {
                const EnergyReport energy = energy_report(report.ledger, device);
                entry["device"] = device.name;
                entry["avg_power_W"] = energy.avg_power_W;
                break;
            }
        }
        entry["frames_received"] = report.frames_received;
        entry["responses_sent"] = report.responses_sent;
        entry["malformed_beacons"] = report.malformed_beacons;
        auto blacklisted = nlohmann::json::array();
        for (const auto& mac : report.blacklisted) blacklisted.push_back(mac.to_string());
        entry["blacklisted"] = std::move(blacklisted);
        doc["stations"].push_back(std::move(entry));
    }
    doc["attacker"]["queries_sent"] = result.attacker_queries_sent;
    doc["attacker"]["replies_heard"] = result.attacker_replies_heard;
    doc["attacker"]["reply_fraction"] = result.reply_fraction();
    doc["warnings"] = result.warnings;
    out << doc.dump(2) << "\n";
}

}  // namespace wakesim
