// SPDX-License-Identifier: Apache-2.0
#include "wakesim/frames.hpp"

#include <charconv>
#include <stdexcept>
#include <utility>

namespace wakesim {

const char* frame_type_name(FrameType type) {
    switch (type) {
        case FrameType::Null: return "null";
        case FrameType::Rts: return "rts";
        case FrameType::Cts: return "cts";
        case FrameType::Ack: return "ack";
        case FrameType::BlockAckRequest: return "bar";
        case FrameType::BlockAck: return "ba";
        case FrameType::Beacon: return "beacon";
        case FrameType::NullFunction: return "null-function";
        case FrameType::Deauthentication: return "deauth";
        case FrameType::Data: return "data";
    }
    return "?";
}

std::optional<FrameKind> parse_frame_kind(std::string_view name) {
    if (name == "null") return FrameKind::null_data();
    if (name == "rts") return FrameKind::rts();
    if (name == "cts") return FrameKind::cts();
    if (name == "ack") return FrameKind::ack();
    if (name == "bar") return FrameKind::bar();
    if (name == "ba") return FrameKind::block_ack();
    if (name == "beacon") return FrameKind::beacon();
    if (name == "null-function") return FrameKind::null_function();
    if (name == "deauth") return FrameKind::deauth();
    if (name.starts_with("data:")) {
        const std::string_view digits = name.substr(5);
        std::uint32_t payload = 0;
        const auto [ptr, ec] =
            std::from_chars(digits.data(), digits.data() + digits.size(), payload);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
        return FrameKind::data(payload);
    }
    return std::nullopt;
}

std::uint32_t frame_size_bytes(FrameKind kind) {
    switch (kind.type) {
        case FrameType::Null: return 28;
        case FrameType::Rts: return 20;
        case FrameType::Cts: return 14;
        case FrameType::Ack: return 14;
        case FrameType::BlockAckRequest: return 24;
        case FrameType::BlockAck: return 32;
        // hdr+FCS 28, fixed fields 12, empty SSID IE 2, TIM IE 5 + 32 (256-bit bitmap)
        case FrameType::Beacon: return 79;
        case FrameType::NullFunction: return 28;
        case FrameType::Deauthentication: return 30;  // mgmt hdr 24 + reason 2 + FCS 4
        case FrameType::Data: return 28 + kind.payload_bytes;
    }
    throw std::invalid_argument("frame_size_bytes: unknown frame type");
}

TimBitmap encode_tim(const std::vector<std::uint16_t>& notified_aids, std::size_t length_bits) {
    TimBitmap tim(length_bits);
    for (const auto aid : notified_aids) {
        const std::size_t index = static_cast<std::size_t>(aid) + 1;
        if (index >= length_bits) {
            throw std::out_of_range("encode_tim: aid " + std::to_string(aid) +
                                    " does not fit a " + std::to_string(length_bits) +
                                    "-bit TIM");
        }
        tim.bits[index] = true;
    }
    return tim;
}

bool tim_bit(const TimBitmap& bitmap, std::uint16_t aid) {
    const std::size_t index = static_cast<std::size_t>(aid) + 1;
    if (index >= bitmap.length_bits()) {
        throw std::out_of_range("tim_bit: aid " + std::to_string(aid) + " does not fit a " +
                                std::to_string(bitmap.length_bits()) + "-bit TIM");
    }
    return bitmap.bits[index];
}

std::optional<PhyTiming> PhyTiming::preset(std::string_view name) {
    if (name == "g24") return band_2g4();
    if (name == "g24-short-slot") return band_2g4_short_slot();
    if (name == "a5") return band_5g();
    return std::nullopt;
}

Frame make_query(FrameKind kind, const MacAddress& src, const MacAddress& dst,
                 double bitrate_mbps) {
    Frame frame;
    frame.kind = kind;
    frame.src = src;
    frame.dst = dst;
    frame.bitrate_mbps = bitrate_mbps;
    return frame;
}

Frame make_beacon(const MacAddress& src, const MacAddress& dst, std::string ssid, TimBitmap tim,
                  double bitrate_mbps) {
    Frame frame;
    frame.kind = FrameKind::beacon();
    frame.src = src;
    frame.dst = dst;
    frame.bitrate_mbps = bitrate_mbps;
    frame.tim = std::move(tim);
    frame.ssid = std::move(ssid);
    return frame;
}

Frame make_null_function(const MacAddress& src, const MacAddress& dst, bool pm_bit,
                         std::uint16_t aid, double bitrate_mbps) {
    Frame frame;
    frame.kind = FrameKind::null_function();
    frame.src = src;
    frame.dst = dst;
    frame.bitrate_mbps = bitrate_mbps;
    frame.pm_bit = pm_bit;
    frame.aid = aid;
    return frame;
}

std::optional<FrameKind> response_kind_for(FrameKind query) {
    switch (query.type) {
        case FrameType::Null:
        case FrameType::Data:
        case FrameType::NullFunction:
        case FrameType::Deauthentication:
            return FrameKind::ack();
        case FrameType::Rts:
            return FrameKind::cts();
        case FrameType::BlockAckRequest:
            return FrameKind::block_ack();
        case FrameType::Beacon:            // power-save handling, never ACKed here
        case FrameType::Cts:
        case FrameType::Ack:
        case FrameType::BlockAck:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<FrameKind> response_for(const Frame& frame, const MacAddress& my_mac) {
    if (frame.dst.is_broadcast() || frame.dst != my_mac) return std::nullopt;
    return response_kind_for(frame.kind);
}

double airtime_us(FrameKind kind, double bitrate_mbps, const PhyTiming& phy) {
    if (bitrate_mbps <= 0.0) {
        throw std::invalid_argument("airtime_us: bitrate must be positive, got " +
                                    std::to_string(bitrate_mbps));
    }
    return phy.preamble_us(bitrate_mbps) +
           static_cast<double>(frame_size_bytes(kind)) * 8.0 / bitrate_mbps;
}

}  // namespace wakesim
