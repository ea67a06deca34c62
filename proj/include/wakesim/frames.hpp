// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wakesim/mac_address.hpp"

namespace wakesim {

enum class FrameType : std::uint8_t {
    Null,  // data frame without payload
    Rts,
    Cts,
    Ack,
    BlockAckRequest,
    BlockAck,
    Beacon,
    NullFunction,  // power-management null data frame
    Deauthentication,
    Data,  // data frame with payload
};

/// Frame kind: type plus payload size for Data frames.
struct FrameKind {
    FrameType type = FrameType::Null;
    std::uint32_t payload_bytes = 0;  // Data only

    static constexpr FrameKind null_data() { return {FrameType::Null, 0}; }
    static constexpr FrameKind rts() { return {FrameType::Rts, 0}; }
    static constexpr FrameKind cts() { return {FrameType::Cts, 0}; }
    static constexpr FrameKind ack() { return {FrameType::Ack, 0}; }
    static constexpr FrameKind bar() { return {FrameType::BlockAckRequest, 0}; }
    static constexpr FrameKind block_ack() { return {FrameType::BlockAck, 0}; }
    static constexpr FrameKind beacon() { return {FrameType::Beacon, 0}; }
    static constexpr FrameKind null_function() { return {FrameType::NullFunction, 0}; }
    static constexpr FrameKind deauth() { return {FrameType::Deauthentication, 0}; }
    static constexpr FrameKind data(std::uint32_t payload) { return {FrameType::Data, payload}; }

    bool operator==(const FrameKind&) const = default;
};

const char* frame_type_name(FrameType type);

/// Parses "null", "rts", "bar", "data:<payload_bytes>", ... as used in config files.
std::optional<FrameKind> parse_frame_kind(std::string_view name);

/// On-air size in bytes, MAC header + FCS included.
/// Fixed per kind: Null 28, Ack 14, RTS 20, CTS 14, BAR 24, BA 32,
/// Data 28 + payload. Beacon (79), NullFunction (28) and Deauthentication (30)
/// are model constants assuming the default 256-bit TIM and an empty SSID IE.
std::uint32_t frame_size_bytes(FrameKind kind);

/// Traffic Indication Map carried by beacons. Bit (aid + 1) flags buffered
/// downlink traffic for association ID aid.
struct TimBitmap {
    std::vector<bool> bits;

    explicit TimBitmap(std::size_t length_bits = 256) : bits(length_bits, false) {}

    static TimBitmap all_set(std::size_t length_bits = 256) {
        TimBitmap tim(length_bits);
        tim.bits.assign(length_bits, true);
        return tim;
    }

    std::size_t length_bits() const { return bits.size(); }

    bool operator==(const TimBitmap&) const = default;
};

/// Sets bit (aid + 1) for every aid in notified_aids, all other bits clear.
/// Throws std::out_of_range naming the offending aid when aid + 1 >= length.
TimBitmap encode_tim(const std::vector<std::uint16_t>& notified_aids,
                     std::size_t length_bits = 256);

/// Reads bit (aid + 1). Throws std::out_of_range on out-of-range aid.
bool tim_bit(const TimBitmap& bitmap, std::uint16_t aid);

/// Channel access timing constants for one band preset.
struct PhyTiming {
    double sifs_us = 10.0;
    double difs_us = 50.0;
    double slot_us = 20.0;
    int cw_min = 31;
    double preamble_dsss_us = 192.0;  // long preamble, 1/2/5.5/11 Mbps
    double preamble_ofdm_us = 16.0;

    /// DSSS/CCK rate set; everything else is treated as OFDM.
    static bool dsss_rate(double bitrate_mbps) {
        for (const double rate : {1.0, 2.0, 5.5, 11.0}) {
            if (std::abs(bitrate_mbps - rate) < 1e-9) return true;
        }
        return false;
    }

    double preamble_us(double bitrate_mbps) const {
        return dsss_rate(bitrate_mbps) ? preamble_dsss_us : preamble_ofdm_us;
    }

    /// 2.4 GHz defaults (long slot).
    static PhyTiming band_2g4() { return PhyTiming{}; }

    /// 2.4 GHz with the short slot (9 us, DIFS 28 us). Calibrated so the
    /// BAR 6-vs-1 Mbps saturation packet ratio lands at ~3.55.
    static PhyTiming band_2g4_short_slot() {
        PhyTiming phy;
        phy.slot_us = 9.0;
        phy.difs_us = 28.0;
        return phy;
    }

    /// 5 GHz OFDM-only preset.
    static PhyTiming band_5g() {
        PhyTiming phy;
        phy.sifs_us = 16.0;
        phy.slot_us = 9.0;
        phy.difs_us = 34.0;
        phy.cw_min = 15;
        return phy;
    }

    static std::optional<PhyTiming> preset(std::string_view name);
};

/// One on-air frame. tim/ssid are present iff kind is Beacon; pm_bit iff
/// NullFunction. aid rides along on NullFunction frames as simulation
/// bookkeeping (real null frames do not carry the association ID).
struct Frame {
    FrameKind kind;
    MacAddress src;
    MacAddress dst;
    double bitrate_mbps = 1.0;
    std::optional<TimBitmap> tim;
    std::optional<std::string> ssid;
    std::optional<bool> pm_bit;
    std::optional<std::uint16_t> aid;
};

Frame make_query(FrameKind kind, const MacAddress& src, const MacAddress& dst,
                 double bitrate_mbps);
Frame make_beacon(const MacAddress& src, const MacAddress& dst, std::string ssid,
                  TimBitmap tim, double bitrate_mbps = 1.0);
Frame make_null_function(const MacAddress& src, const MacAddress& dst, bool pm_bit,
                         std::uint16_t aid, double bitrate_mbps = 1.0);

/// Response kind elicited by a query kind, address checks aside.
/// Null/Data/NullFunction/Deauthentication -> Ack, RTS -> CTS, BAR -> BA.
/// Control frames and beacons elicit nothing.
std::optional<FrameKind> response_kind_for(FrameKind query);

/// The receive-side response decision. Pure in (frame.dst, frame.kind, my_mac):
/// src, payload and any association or blacklist state are never consulted.
/// Broadcast frames are never acknowledged.
std::optional<FrameKind> response_for(const Frame& frame, const MacAddress& my_mac);

/// preamble + 8 * size / bitrate, in microseconds. Throws std::invalid_argument
/// on non-positive bitrate.
double airtime_us(FrameKind kind, double bitrate_mbps, const PhyTiming& phy);

}  // namespace wakesim
