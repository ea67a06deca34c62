// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace wakesim {

/// Opaque 6-byte 802.11 address. No OUI semantics.
struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    static constexpr MacAddress broadcast() {
        return MacAddress{{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}};
    }

    /// Parses "aa:bb:cc:dd:ee:ff" (case-insensitive). Throws std::invalid_argument.
    static MacAddress parse(std::string_view text);

    std::string to_string() const;

    bool is_broadcast() const { return *this == broadcast(); }

    auto operator<=>(const MacAddress&) const = default;
};

}  // namespace wakesim

template <>
struct std::hash<wakesim::MacAddress> {
    std::size_t operator()(const wakesim::MacAddress& m) const noexcept {
        std::uint64_t v = 0;
        for (auto o : m.octets) v = (v << 8) | o;
        return std::hash<std::uint64_t>{}(v);
    }
};
