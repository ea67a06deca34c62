// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "wakesim/medium.hpp"

using namespace wakesim;

TEST_CASE("event queue dispatches in timestamp order, ties by insertion") {
    EventQueue queue;
    std::vector<int> order;
    CHECK(queue.run_until(1000) == 0);

    queue.schedule_at(5000, [&] { order.push_back(5); });
    queue.schedule_at(3000, [&] { order.push_back(3); });
    queue.schedule_at(3000, [&] { order.push_back(31); });
    CHECK(queue.run_until(10'000) == 3);
    CHECK(order == std::vector<int>{3, 31, 5});
    CHECK(queue.now() == 10'000);
}

TEST_CASE("events scheduled during dispatch inside the horizon still run") {
    EventQueue queue;
    int fired = 0;
    queue.schedule_at(10, [&] {
        ++fired;
        queue.schedule_in(5, [&] { ++fired; });
        queue.schedule_in(1'000'000, [&] { ++fired; });  // beyond horizon
    });
    CHECK(queue.run_until(100) == 2);
    CHECK(fired == 2);
    CHECK_THROWS_AS(queue.run_until(50), std::invalid_argument);
    CHECK_THROWS_AS(queue.schedule_at(10, [] {}), std::invalid_argument);
}

TEST_CASE("reply-rate table interpolates and clamps") {
    const ReplyRateTable table = ReplyRateTable::default_table();
    CHECK(table.probability_at(0.0) == doctest::Approx(0.97));
    CHECK(table.probability_at(5.0) == doctest::Approx(0.97));
    CHECK(table.probability_at(150.0) == doctest::Approx(0.73));
    CHECK(table.probability_at(500.0) == doctest::Approx(0.73));
    CHECK(table.probability_at(125.0) == doctest::Approx((0.99 + 0.73) / 2.0));

    CHECK_THROWS_AS(ReplyRateTable({{5.0, 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(ReplyRateTable({{5.0, 0.9}, {5.0, 0.8}}), std::invalid_argument);
    CHECK_THROWS_AS(ReplyRateTable({}), std::invalid_argument);
}

TEST_CASE("deliver long-run frequency matches the table") {
    const ReplyRateTable table = ReplyRateTable::default_table();
    Rng rng(1234);
    const int n = 10'000;
    for (const auto& [distance, expected] : {std::pair{5.0, 0.97}, std::pair{150.0, 0.73}}) {
        int hits = 0;
        for (int i = 0; i < n; ++i) {
            if (deliver(distance, table, rng)) ++hits;
        }
        CHECK(std::abs(static_cast<double>(hits) / n - expected) <= 0.02);
    }

    const ReplyRateTable always({{1.0, 1.0}});
    for (int i = 0; i < 100; ++i) CHECK(deliver(10.0, always, rng));
}

TEST_CASE("exchange cycle matches the hand sum at 1 Mbps") {
    const PhyTiming phy = PhyTiming::band_2g4();
    // DIFS 50 + backoff 310 + BAR 384 + SIFS 10 + BA 448
    CHECK(exchange_cycle_us(FrameKind::bar(), 1.0, phy) == doctest::Approx(1202.0));
    CHECK(1e6 / exchange_cycle_us(FrameKind::bar(), 1.0, phy) == doctest::Approx(832.0).epsilon(0.001));
    CHECK_THROWS_AS(exchange_cycle_us(FrameKind::ack(), 1.0, phy), std::invalid_argument);
}

TEST_CASE("SIFS contributes linearly to the cycle") {
    PhyTiming phy = PhyTiming::band_2g4();
    const double base = exchange_cycle_us(FrameKind::bar(), 1.0, phy);
    phy.sifs_us += 6.0;
    CHECK(exchange_cycle_us(FrameKind::bar(), 1.0, phy) == doctest::Approx(base + 6.0));
}

TEST_CASE("packets per second grow sublinearly in bitrate") {
    for (const PhyTiming& phy : {PhyTiming::band_2g4(), PhyTiming::band_2g4_short_slot()}) {
        const double ratio = exchange_cycle_us(FrameKind::bar(), 1.0, phy) /
                             exchange_cycle_us(FrameKind::bar(), 6.0, phy);
        CHECK(ratio > 1.0);
        CHECK(ratio < 6.0);

        // Strict cycle decrease within each modulation family.
        for (const FrameKind kind : {FrameKind::bar(), FrameKind::null_data(), FrameKind::rts()}) {
            CHECK(exchange_cycle_us(kind, 2.0, phy) < exchange_cycle_us(kind, 1.0, phy));
            CHECK(exchange_cycle_us(kind, 5.5, phy) < exchange_cycle_us(kind, 2.0, phy));
            CHECK(exchange_cycle_us(kind, 12.0, phy) < exchange_cycle_us(kind, 6.0, phy));
            CHECK(exchange_cycle_us(kind, 24.0, phy) < exchange_cycle_us(kind, 12.0, phy));
        }

        // Sublinearity within each modulation family: pkt/s ratio stays
        // below the bitrate ratio (the preamble step at the DSSS->OFDM
        // boundary breaks it across families, on real radios too).
        const std::vector<std::vector<double>> families = {{1.0, 2.0, 5.5, 11.0},
                                                           {6.0, 12.0, 24.0, 54.0}};
        for (const auto& rates : families) {
            for (std::size_t i = 0; i < rates.size(); ++i) {
                for (std::size_t j = i + 1; j < rates.size(); ++j) {
                    const double pkt_ratio = exchange_cycle_us(FrameKind::bar(), rates[i], phy) /
                                             exchange_cycle_us(FrameKind::bar(), rates[j], phy);
                    CHECK(pkt_ratio < rates[j] / rates[i]);
                }
            }
        }
    }
}

TEST_CASE("default ratio sits in the observed band, short slot hits 3.3 +- 0.3") {
    const PhyTiming g24 = PhyTiming::band_2g4();
    const double default_ratio = exchange_cycle_us(FrameKind::bar(), 1.0, g24) /
                                 exchange_cycle_us(FrameKind::bar(), 6.0, g24);
    CHECK(default_ratio >= 2.5);
    CHECK(default_ratio <= 4.5);

    const PhyTiming calib = PhyTiming::band_2g4_short_slot();
    const double calib_ratio = exchange_cycle_us(FrameKind::bar(), 1.0, calib) /
                               exchange_cycle_us(FrameKind::bar(), 6.0, calib);
    CHECK(calib_ratio == doctest::Approx(3.3).epsilon(0.1));
}

TEST_CASE("response bitrate rule") {
    CHECK(response_bitrate_mbps(FrameKind::bar(), 6.0) == 6.0);    // control answers at query rate
    CHECK(response_bitrate_mbps(FrameKind::rts(), 5.5) == 5.5);
    CHECK(response_bitrate_mbps(FrameKind::null_data(), 54.0) == 24.0);  // highest basic <= 54
    CHECK(response_bitrate_mbps(FrameKind::null_data(), 11.0) == 11.0);
    CHECK(response_bitrate_mbps(FrameKind::data(100), 9.0) == 6.0);
    CHECK(response_bitrate_mbps(FrameKind::null_data(), 0.5) == 1.0);  // below every basic rate
}
