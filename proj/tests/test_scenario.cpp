// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "wakesim/simulation.hpp"

using namespace wakesim;

namespace {

const char* kBaseScenario = R"json({
  "schema": 1,
  "seed": 7,
  "duration_s": 5.0,
  "phy": "g24",
  "medium": {"reply_rate_table": [[1.0, 1.0]], "attacker_distance_m": 1.0},
  "stations": [
    {"mac": "02:00:00:00:00:01", "is_ap": true, "ssid": "lab"},
    {"mac": "02:00:00:00:00:02", "aid": 1, "ap": "02:00:00:00:00:01", "ssid": "lab"}
  ],
  "attacker": {
    "mac": "aa:bb:bb:bb:bb:bb",
    "target": "02:00:00:00:00:02",
    "query_kind": "bar",
    "query_bitrate_mbps": 1.0,
    "query_rate": "saturate",
    "beacon_period_ms": 200.0,
    "spoofed_ap": {"mac": "02:00:00:00:00:01", "ssid": "lab"},
    "target_aid": 1
  }
})json";

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test");
}

std::string events_csv(const SimResult& result) {
    std::ostringstream out;
    write_events_csv(result, out);
    return out.str();
}

}  // namespace

TEST_CASE("scenario JSON parses into a runnable description") {
    const Scenario scenario = parse(kBaseScenario);
    CHECK(scenario.seed == 7);
    CHECK(scenario.duration_s == 5.0);
    CHECK(scenario.stations.size() == 2);
    CHECK(scenario.stations[0].is_ap);
    REQUIRE(scenario.attack.has_value());
    CHECK(scenario.attack->query_kind == FrameKind::bar());
    CHECK(scenario.attack->beacon_period_ns == 200'000'000);
}

TEST_CASE("unknown keys and bad references are rejected with their path") {
    std::string with_typo = kBaseScenario;
    with_typo.replace(with_typo.find("\"seed\""), 6, "\"sede\"");
    CHECK_THROWS_WITH_AS(parse(with_typo), doctest::Contains("sede"), ScenarioError);

    std::string bad_target = kBaseScenario;
    bad_target.replace(bad_target.find("02:00:00:00:00:02\",\n    \"query_kind"), 17,
                       "02:00:00:00:00:99");
    CHECK_THROWS_WITH_AS(parse(bad_target), doctest::Contains("attacker/target"), ScenarioError);

    std::string no_schema = kBaseScenario;
    no_schema.replace(no_schema.find("\"schema\": 1"), 11, "\"schema\": 2");
    CHECK_THROWS_WITH_AS(parse(no_schema), doctest::Contains("schema"), ScenarioError);

    CHECK_THROWS_AS(parse("{not json"), ScenarioError);
}

TEST_CASE("keep-awake scenario pins the victim awake; query-only leaves it sparse") {
    Scenario keep_awake = parse(kBaseScenario);
    keep_awake.duration_s = 20.0;
    const SimResult awake_result = run_scenario(keep_awake);
    const auto& victim = awake_result.station(MacAddress::parse("02:00:00:00:00:02"));
    CHECK(victim.awake_fraction >= 0.95);
    CHECK(awake_result.attacker_queries_sent > 10'000);
    // Continuous responses: nearly every query answered.
    CHECK(awake_result.reply_fraction() > 0.9);

    Scenario query_only = parse(kBaseScenario);
    query_only.duration_s = 20.0;
    query_only.attack->beacon_period_ns = 0;
    const SimResult sparse_result = run_scenario(query_only);
    const auto& sparse_victim = sparse_result.station(MacAddress::parse("02:00:00:00:00:02"));
    CHECK(sparse_victim.awake_fraction < 0.30);
    CHECK(sparse_result.reply_fraction() < 0.30);
    // Sparse but not silent: the victim answers inside its listen windows.
    CHECK(sparse_result.attacker_replies_heard > 0);

    // Queries answered track the awake duty cycle.
    CHECK(sparse_result.reply_fraction() ==
          doctest::Approx(sparse_victim.awake_fraction).epsilon(0.25));
}

TEST_CASE("a beacon flood gets the attacker blacklisted and the victim back asleep") {
    Scenario flood = parse(kBaseScenario);
    flood.duration_s = 20.0;
    flood.attack->beacon_period_ns = 10'000'000;  // 100 per second
    flood.attack->spoofed_ap_mac = MacAddress::parse("a2:00:00:00:00:aa");
    const SimResult result = run_scenario(flood);
    const auto& victim = result.station(MacAddress::parse("02:00:00:00:00:02"));
    REQUIRE(victim.blacklisted.size() == 1);
    CHECK(victim.blacklisted[0] == flood.attack->spoofed_ap_mac);
    CHECK(victim.awake_fraction < 0.30);
    CHECK(!result.warnings.empty());
}

TEST_CASE("ledger conservation holds for every simulated station") {
    Scenario scenario = parse(kBaseScenario);
    const SimResult result = run_scenario(scenario);
    for (const auto& report : result.stations) {
        CHECK(report.ledger.sleep_ns + report.ledger.idle_ns + report.ledger.rx_ns +
                  report.ledger.tx_ns ==
              report.ledger.elapsed_ns());
        CHECK(report.ledger.elapsed_ns() >= seconds_to_ns(scenario.duration_s));
    }
}

TEST_CASE("reruns with the same seed are byte-identical; seeds change the trace") {
    const Scenario scenario = parse(kBaseScenario);
    const SimResult a = run_scenario(scenario);
    const SimResult b = run_scenario(scenario);
    CHECK(events_csv(a) == events_csv(b));

    std::ostringstream ledger_a, ledger_b, timeline_a, timeline_b;
    write_ledgers_json(a, ledger_a);
    write_ledgers_json(b, ledger_b);
    write_timeline_csv(a, timeline_a);
    write_timeline_csv(b, timeline_b);
    CHECK(ledger_a.str() == ledger_b.str());
    CHECK(timeline_a.str() == timeline_b.str());

    Scenario reseeded = scenario;
    reseeded.seed = 8;
    reseeded.reply_table = ReplyRateTable({{1.0, 0.8}});  // make draws matter
    Scenario reseeded2 = reseeded;
    reseeded2.seed = 9;
    CHECK(events_csv(run_scenario(reseeded)) != events_csv(run_scenario(reseeded2)));
}

TEST_CASE("simulated reply rate follows the distance table") {
    Scenario scenario = parse(kBaseScenario);
    scenario.duration_s = 15.0;  // ~12.5k queries at 832/s
    scenario.reply_table = ReplyRateTable::default_table();
    scenario.attacker_distance_m = 5.0;
    scenario.stations[1].always_awake = true;  // isolate the link loss
    const SimResult result = run_scenario(scenario);
    CHECK(result.attacker_queries_sent >= 10'000);
    CHECK(result.reply_fraction() == doctest::Approx(0.97).epsilon(0.021));

    scenario.attacker_distance_m = 150.0;
    const SimResult far = run_scenario(scenario);
    CHECK(far.reply_fraction() == doctest::Approx(0.73).epsilon(0.03));
}

TEST_CASE("discovery works on a simulated probe scenario") {
    Scenario scenario = parse(kBaseScenario);
    scenario.duration_s = 2.0;
    // Second client.
    StationConfig extra = scenario.stations[1];
    extra.mac = MacAddress::parse("02:00:00:00:00:03");
    extra.aid = 2;
    scenario.stations.push_back(extra);
    // Broadcast probe with an all-set TIM, right inside the TBTT listen window.
    scenario.attack->beacon_delivery = BeaconDelivery::Broadcast;
    scenario.attack->target_aid.reset();
    scenario.attack->rate_mode = QueryRateMode::Fixed;
    scenario.attack->query_rate_pps = 0.0;
    scenario.attack->beacon_period_ns = 200'000'000;

    const SimResult result = run_scenario(scenario);
    std::vector<Frame> sniffed;
    for (const auto& record : result.events) {
        if (record.delivered) sniffed.push_back(record.frame);
    }
    const DiscoveryResult discovery = discover_targets(sniffed);
    CHECK(discovery.ap_mac == MacAddress::parse("02:00:00:00:00:01"));
    CHECK(discovery.ssid == "lab");
    REQUIRE(discovery.clients.size() == 2);
    CHECK(discovery.clients[0].aid == 1);
    CHECK(discovery.clients[1].aid == 2);
}
