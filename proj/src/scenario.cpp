// SPDX-License-Identifier: Apache-2.0
#include "wakesim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>

#include "json.hpp"

namespace wakesim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
    throw ScenarioError(where + ": " + message);
}

void check_keys(const json& object, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!object.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : object.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            fail(where + "/" + key, "unknown key");
        }
    }
}

double get_number(const json& object, const std::string& where, const char* key,
                  std::optional<double> fallback = std::nullopt) {
    if (!object.contains(key)) {
        if (fallback) return *fallback;
        fail(where + "/" + key, "missing required number");
    }
    if (!object[key].is_number()) fail(where + "/" + key, "expected a number");
    return object[key].get<double>();
}

std::string get_string(const json& object, const std::string& where, const char* key,
                       std::optional<std::string> fallback = std::nullopt) {
    if (!object.contains(key)) {
        if (fallback) return *fallback;
        fail(where + "/" + key, "missing required string");
    }
    if (!object[key].is_string()) fail(where + "/" + key, "expected a string");
    return object[key].get<std::string>();
}

bool get_bool(const json& object, const std::string& where, const char* key, bool fallback) {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_boolean()) fail(where + "/" + key, "expected a boolean");
    return object[key].get<bool>();
}

MacAddress get_mac(const json& object, const std::string& where, const char* key) {
    const std::string text = get_string(object, where, key);
    try {
        return MacAddress::parse(text);
    } catch (const std::invalid_argument& e) {
        fail(where + "/" + key, e.what());
    }
}

PhyTiming parse_phy(const json& value, const std::string& where) {
    if (value.is_string()) {
        const auto preset = PhyTiming::preset(value.get<std::string>());
        if (!preset) fail(where, "unknown PHY preset '" + value.get<std::string>() + "'");
        return *preset;
    }
    check_keys(value, where,
               {"sifs_us", "difs_us", "slot_us", "cw_min", "preamble_dsss_us",
                "preamble_ofdm_us"});
    PhyTiming phy;
    phy.sifs_us = get_number(value, where, "sifs_us", phy.sifs_us);
    phy.difs_us = get_number(value, where, "difs_us", phy.difs_us);
    phy.slot_us = get_number(value, where, "slot_us", phy.slot_us);
    phy.cw_min = static_cast<int>(get_number(value, where, "cw_min", phy.cw_min));
    phy.preamble_dsss_us = get_number(value, where, "preamble_dsss_us", phy.preamble_dsss_us);
    phy.preamble_ofdm_us = get_number(value, where, "preamble_ofdm_us", phy.preamble_ofdm_us);
    return phy;
}

StationConfig parse_station(const json& value, const std::string& where) {
    check_keys(value, where,
               {"mac", "aid", "ap", "ssid", "is_ap", "deauth_on_fake", "always_awake", "device",
                "listen_interval_ms", "awake_timeout_ms", "listen_window_ms",
                "suspicion_threshold", "suspicion_window_ms"});
    StationConfig cfg;
    cfg.mac = get_mac(value, where, "mac");
    cfg.is_ap = get_bool(value, where, "is_ap", false);
    cfg.always_awake = get_bool(value, where, "always_awake", cfg.is_ap);
    cfg.deauth_on_fake = get_bool(value, where, "deauth_on_fake", false);
    cfg.ssid = get_string(value, where, "ssid", std::string{});
    if (cfg.is_ap) {
        cfg.ap_mac = cfg.mac;
        cfg.aid = 0;
    } else {
        cfg.ap_mac = get_mac(value, where, "ap");
        cfg.aid = static_cast<std::uint16_t>(get_number(value, where, "aid"));
    }
    cfg.beacon_listen_interval_ns =
        us_to_ns(get_number(value, where, "listen_interval_ms", 102.4) * 1000.0);
    cfg.awake_timeout_ns = us_to_ns(get_number(value, where, "awake_timeout_ms", 500.0) * 1000.0);
    cfg.listen_window_ns = us_to_ns(get_number(value, where, "listen_window_ms", 10.0) * 1000.0);
    cfg.suspicion.threshold =
        static_cast<int>(get_number(value, where, "suspicion_threshold", 20.0));
    cfg.suspicion.window_ns =
        us_to_ns(get_number(value, where, "suspicion_window_ms", 1000.0) * 1000.0);
    cfg.device_profile = get_string(value, where, "device", std::string{"esp32"});
    return cfg;
}

AttackConfig parse_attack(const json& value, const std::string& where) {
    check_keys(value, where,
               {"mac", "target", "query_kind", "query_bitrate_mbps", "query_rate",
                "beacon_period_ms", "beacon_start_offset_ms", "beacon_delivery", "spoofed_ap",
                "target_aid"});
    AttackConfig cfg;
    cfg.attacker_mac = get_mac(value, where, "mac");
    cfg.target = get_mac(value, where, "target");

    const std::string kind = get_string(value, where, "query_kind", "bar");
    const auto parsed = parse_frame_kind(kind);
    if (!parsed) fail(where + "/query_kind", "unknown frame kind '" + kind + "'");
    cfg.query_kind = *parsed;
    if (!response_kind_for(cfg.query_kind)) {
        fail(where + "/query_kind", std::string("'") + kind + "' elicits no response");
    }
    cfg.query_bitrate_mbps = get_number(value, where, "query_bitrate_mbps", 1.0);
    if (cfg.query_bitrate_mbps <= 0.0) fail(where + "/query_bitrate_mbps", "must be positive");

    if (value.contains("query_rate")) {
        const auto& rate = value["query_rate"];
        if (rate.is_string() && rate.get<std::string>() == "saturate") {
            cfg.rate_mode = QueryRateMode::Saturate;
        } else if (rate.is_number()) {
            cfg.rate_mode = QueryRateMode::Fixed;
            cfg.query_rate_pps = rate.get<double>();
            if (cfg.query_rate_pps < 0.0) fail(where + "/query_rate", "must be >= 0");
        } else {
            fail(where + "/query_rate", "expected \"saturate\" or a number");
        }
    }

    cfg.beacon_period_ns = us_to_ns(get_number(value, where, "beacon_period_ms", 0.0) * 1000.0);
    cfg.beacon_start_offset_ns =
        us_to_ns(get_number(value, where, "beacon_start_offset_ms", 1.0) * 1000.0);
    if (cfg.beacon_period_ns < 0) fail(where + "/beacon_period_ms", "must be >= 0");

    const std::string delivery = get_string(value, where, "beacon_delivery", "unicast");
    if (delivery == "unicast") {
        cfg.beacon_delivery = BeaconDelivery::Unicast;
    } else if (delivery == "broadcast") {
        cfg.beacon_delivery = BeaconDelivery::Broadcast;
    } else {
        fail(where + "/beacon_delivery", "expected \"unicast\" or \"broadcast\"");
    }

    if (value.contains("spoofed_ap")) {
        const auto& spoofed = value["spoofed_ap"];
        check_keys(spoofed, where + "/spoofed_ap", {"mac", "ssid"});
        cfg.spoofed_ap_mac = get_mac(spoofed, where + "/spoofed_ap", "mac");
        cfg.spoofed_ssid = get_string(spoofed, where + "/spoofed_ap", "ssid", std::string{});
    }
    if (value.contains("target_aid")) {
        cfg.target_aid = static_cast<std::uint16_t>(get_number(value, where, "target_aid"));
    }
    return cfg;
}

BreathScenario parse_breath(const json& value, const std::string& where, std::uint64_t seed) {
    check_keys(value, where,
               {"persons", "packet_rate_hz", "jitter_mean_ms", "min_spacing_ms", "noise_sigma",
                "baseline_mean", "modulation_amplitude", "distance_cutoff_m", "duration_s",
                "seed"});
    BreathScenario breath;
    breath.seed = value.contains("seed")
                      ? static_cast<std::uint64_t>(get_number(value, where, "seed"))
                      : seed;
    breath.duration_s = get_number(value, where, "duration_s");
    breath.nominal_packet_rate_hz = get_number(value, where, "packet_rate_hz", 10.0);
    breath.jitter_mean_s = get_number(value, where, "jitter_mean_ms", 20.0) / 1000.0;
    breath.min_spacing_s = get_number(value, where, "min_spacing_ms", 5.0) / 1000.0;
    breath.noise_sigma = get_number(value, where, "noise_sigma", 0.05);
    breath.baseline_mean = get_number(value, where, "baseline_mean", 10.0);
    breath.modulation_amplitude = get_number(value, where, "modulation_amplitude", 1.0);
    breath.distance_cutoff_m = get_number(value, where, "distance_cutoff_m", 1.4);
    if (value.contains("persons")) {
        if (!value["persons"].is_array()) fail(where + "/persons", "expected an array");
        std::size_t i = 0;
        for (const auto& entry : value["persons"]) {
            const std::string person_where = where + "/persons/" + std::to_string(i++);
            check_keys(entry, person_where, {"rate_bpm", "distance_m", "presence_s"});
            PersonSpec person;
            person.rate_bpm = get_number(entry, person_where, "rate_bpm");
            person.distance_m = get_number(entry, person_where, "distance_m", 0.5);
            if (entry.contains("presence_s")) {
                if (!entry["presence_s"].is_array()) {
                    fail(person_where + "/presence_s", "expected an array of [start, end] pairs");
                }
                for (const auto& span : entry["presence_s"]) {
                    if (!span.is_array() || span.size() != 2 || !span[0].is_number() ||
                        !span[1].is_number()) {
                        fail(person_where + "/presence_s", "expected [start_s, end_s] pairs");
                    }
                    person.presence_s.emplace_back(span[0].get<double>(), span[1].get<double>());
                }
            }
            breath.persons.push_back(std::move(person));
        }
    }
    return breath;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
    const std::string root = origin;
    check_keys(doc, root,
               {"schema", "seed", "duration_s", "phy", "medium", "stations", "attacker",
                "breath"});
    if (!doc.contains("schema") || doc["schema"] != 1) {
        fail(root + "/schema", "missing or unsupported schema (expected 1)");
    }

    Scenario scenario;
    scenario.seed = static_cast<std::uint64_t>(get_number(doc, root, "seed", 1.0));
    scenario.duration_s = get_number(doc, root, "duration_s", 10.0);
    if (scenario.duration_s <= 0.0) fail(root + "/duration_s", "must be positive");

    if (doc.contains("phy")) scenario.phy = parse_phy(doc["phy"], root + "/phy");

    if (doc.contains("medium")) {
        const auto& medium = doc["medium"];
        check_keys(medium, root + "/medium",
                   {"reply_rate_table", "attacker_distance_m", "ap_beacon_offset_ms"});
        scenario.attacker_distance_m =
            get_number(medium, root + "/medium", "attacker_distance_m", 5.0);
        scenario.ap_beacon_offset_ns =
            us_to_ns(get_number(medium, root + "/medium", "ap_beacon_offset_ms", 2.0) * 1000.0);
        if (medium.contains("reply_rate_table")) {
            std::vector<ReplyRateTable::Point> points;
            for (const auto& row : medium["reply_rate_table"]) {
                if (!row.is_array() || row.size() != 2) {
                    fail(root + "/medium/reply_rate_table",
                         "expected [distance_m, probability] pairs");
                }
                points.push_back({row[0].get<double>(), row[1].get<double>()});
            }
            try {
                scenario.reply_table = ReplyRateTable(std::move(points));
            } catch (const std::invalid_argument& e) {
                fail(root + "/medium/reply_rate_table", e.what());
            }
        }
    }

    std::set<MacAddress> station_macs;
    if (doc.contains("stations")) {
        if (!doc["stations"].is_array()) fail(root + "/stations", "expected an array");
        std::size_t i = 0;
        for (const auto& entry : doc["stations"]) {
            const std::string where = root + "/stations/" + std::to_string(i++);
            StationConfig cfg = parse_station(entry, where);
            if (!station_macs.insert(cfg.mac).second) {
                fail(where + "/mac", "duplicate station MAC " + cfg.mac.to_string());
            }
            scenario.stations.push_back(std::move(cfg));
        }
    }

    // Referenced MACs must resolve.
    for (std::size_t i = 0; i < scenario.stations.size(); ++i) {
        const auto& cfg = scenario.stations[i];
        if (!cfg.is_ap && !station_macs.contains(cfg.ap_mac)) {
            fail(root + "/stations/" + std::to_string(i) + "/ap",
                 "MAC " + cfg.ap_mac.to_string() + " does not match any station");
        }
    }

    if (doc.contains("attacker")) {
        scenario.attack = parse_attack(doc["attacker"], root + "/attacker");
        if (!station_macs.contains(scenario.attack->target)) {
            fail(root + "/attacker/target",
                 "MAC " + scenario.attack->target.to_string() + " does not match any station");
        }
        if (station_macs.contains(scenario.attack->attacker_mac)) {
            fail(root + "/attacker/mac", "attacker MAC collides with a station");
        }
    }

    if (doc.contains("breath")) {
        scenario.breath = parse_breath(doc["breath"], root + "/breath", scenario.seed);
    }
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open file");
    return parse_scenario(in, path);
}

}  // namespace wakesim
