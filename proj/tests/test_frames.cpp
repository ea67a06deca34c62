// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "wakesim/frames.hpp"

using namespace wakesim;

namespace {
const MacAddress kVictim = MacAddress::parse("02:00:00:00:00:02");
const MacAddress kOther = MacAddress::parse("02:00:00:00:00:03");
const MacAddress kFakeSrc = MacAddress::parse("aa:bb:bb:bb:bb:bb");
}  // namespace

TEST_CASE("on-air sizes follow the query/response table") {
    CHECK(frame_size_bytes(FrameKind::null_data()) == 28);
    CHECK(frame_size_bytes(FrameKind::ack()) == 14);
    CHECK(frame_size_bytes(FrameKind::rts()) == 20);
    CHECK(frame_size_bytes(FrameKind::cts()) == 14);
    CHECK(frame_size_bytes(FrameKind::bar()) == 24);
    CHECK(frame_size_bytes(FrameKind::block_ack()) == 32);
    CHECK(frame_size_bytes(FrameKind::data(100)) == 128);
}

TEST_CASE("response size asymmetry: only BA outgrows its query") {
    CHECK(frame_size_bytes(FrameKind::block_ack()) > frame_size_bytes(FrameKind::bar()));
    for (const FrameKind query : {FrameKind::null_data(), FrameKind::rts(), FrameKind::data(64)}) {
        const auto response = response_kind_for(query);
        REQUIRE(response.has_value());
        CHECK(frame_size_bytes(*response) <= frame_size_bytes(query));
    }
}

TEST_CASE("response mapping") {
    CHECK(*response_for(make_query(FrameKind::null_data(), kFakeSrc, kVictim, 1.0), kVictim) ==
          FrameKind::ack());
    CHECK(*response_for(make_query(FrameKind::bar(), kFakeSrc, kVictim, 1.0), kVictim) ==
          FrameKind::block_ack());
    CHECK(*response_for(make_query(FrameKind::rts(), kFakeSrc, kVictim, 1.0), kVictim) ==
          FrameKind::cts());
    CHECK(!response_for(make_query(FrameKind::null_data(), kFakeSrc, kOther, 1.0), kVictim));
    CHECK(!response_for(make_query(FrameKind::ack(), kFakeSrc, kVictim, 1.0), kVictim));
    CHECK(!response_for(make_query(FrameKind::cts(), kFakeSrc, kVictim, 1.0), kVictim));
    CHECK(!response_for(make_query(FrameKind::block_ack(), kFakeSrc, kVictim, 1.0), kVictim));
    // Beacons route to power-save handling, never an ACK.
    CHECK(!response_for(make_beacon(kFakeSrc, kVictim, "x", TimBitmap::all_set()), kVictim));
    // Broadcast is never acknowledged.
    CHECK(!response_for(make_query(FrameKind::null_data(), kFakeSrc, MacAddress::broadcast(), 1.0),
                        MacAddress::broadcast()));
}

TEST_CASE("response decision ignores src and payload entirely") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 2000; ++i) {
        MacAddress src;
        for (auto& o : src.octets) o = static_cast<std::uint8_t>(byte(rng));
        const std::uint32_t payload = static_cast<std::uint32_t>(byte(rng));
        Frame frame = make_query(FrameKind::data(payload), src, kVictim, 1.0);
        const auto response = response_for(frame, kVictim);
        REQUIRE(response.has_value());
        CHECK(*response == FrameKind::ack());
    }
}

TEST_CASE("airtime at 1 Mbps DSSS") {
    const PhyTiming phy = PhyTiming::band_2g4();
    CHECK(airtime_us(FrameKind::bar(), 1.0, phy) == doctest::Approx(384.0));
    CHECK(airtime_us(FrameKind::ack(), 1.0, phy) == doctest::Approx(304.0));
    CHECK_THROWS_AS(airtime_us(FrameKind::ack(), 0.0, phy), std::invalid_argument);
    CHECK_THROWS_AS(airtime_us(FrameKind::ack(), -1.0, phy), std::invalid_argument);
}

TEST_CASE("airtime strictly decreases in bitrate within a modulation family") {
    const PhyTiming phy = PhyTiming::band_2g4();
    const double dsss[] = {1.0, 2.0, 5.5, 11.0};
    const double ofdm[] = {6.0, 12.0, 24.0, 54.0};
    for (const FrameKind kind : {FrameKind::null_data(), FrameKind::bar(), FrameKind::data(500)}) {
        for (std::size_t i = 1; i < std::size(dsss); ++i) {
            CHECK(airtime_us(kind, dsss[i], phy) < airtime_us(kind, dsss[i - 1], phy));
        }
        for (std::size_t i = 1; i < std::size(ofdm); ++i) {
            CHECK(airtime_us(kind, ofdm[i], phy) < airtime_us(kind, ofdm[i - 1], phy));
        }
    }
}

TEST_CASE("TIM bit placement and the all-set broadcast trick") {
    const TimBitmap tim = encode_tim({7});
    for (std::size_t i = 0; i < tim.length_bits(); ++i) {
        CHECK(tim.bits[i] == (i == 8));
    }
    CHECK(tim_bit(tim, 7));
    CHECK(!tim_bit(tim, 6));

    const TimBitmap empty = encode_tim({});
    CHECK(std::none_of(empty.bits.begin(), empty.bits.end(), [](bool b) { return b; }));

    const TimBitmap all = TimBitmap::all_set();
    for (std::uint16_t aid = 0; aid < 255; ++aid) CHECK(tim_bit(all, aid));
}

TEST_CASE("TIM encode/decode roundtrip over random aid sets") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<int> length_choice(8, 512);
        const auto length = static_cast<std::size_t>(length_choice(rng));
        std::uniform_int_distribution<int> aid_choice(0, static_cast<int>(length) - 2);
        std::set<std::uint16_t> aids;
        std::uniform_int_distribution<int> count_choice(0, 20);
        const int count = count_choice(rng);
        for (int i = 0; i < count; ++i) aids.insert(static_cast<std::uint16_t>(aid_choice(rng)));
        const TimBitmap tim =
            encode_tim(std::vector<std::uint16_t>(aids.begin(), aids.end()), length);
        for (int probe = 0; probe < 40; ++probe) {
            const auto aid = static_cast<std::uint16_t>(aid_choice(rng));
            CHECK(tim_bit(tim, aid) == aids.contains(aid));
        }
    }
}

TEST_CASE("TIM errors name the offending aid") {
    CHECK_THROWS_WITH_AS(encode_tim({255}, 256), doctest::Contains("255"), std::out_of_range);
    CHECK_THROWS_AS(tim_bit(TimBitmap(16), 15), std::out_of_range);
}

TEST_CASE("band presets carry the standard interframe spacings") {
    CHECK(PhyTiming::band_2g4().sifs_us == 10.0);
    CHECK(PhyTiming::band_5g().sifs_us == 16.0);
    CHECK(PhyTiming::band_2g4().difs_us == 50.0);
    CHECK(PhyTiming::band_2g4_short_slot().slot_us == 9.0);
    CHECK(PhyTiming::preset("g24").has_value());
    CHECK(PhyTiming::preset("a5").has_value());
    CHECK(!PhyTiming::preset("bogus").has_value());
}

TEST_CASE("MAC parse/format") {
    const MacAddress mac = MacAddress::parse("aa:bb:bb:bb:bb:bb");
    CHECK(mac.to_string() == "aa:bb:bb:bb:bb:bb");
    CHECK(MacAddress::broadcast().is_broadcast());
    CHECK_THROWS_AS(MacAddress::parse("not-a-mac"), std::invalid_argument);
    CHECK_THROWS_AS(MacAddress::parse("aa:bb:cc:dd:ee"), std::invalid_argument);
    CHECK_THROWS_AS(MacAddress::parse("aa:bb:cc:dd:ee:gg"), std::invalid_argument);
}
