// SPDX-License-Identifier: Apache-2.0
#include "wakesim/mac_address.hpp"

#include <cstdio>
#include <stdexcept>

namespace wakesim {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

MacAddress MacAddress::parse(std::string_view text) {
    MacAddress mac;
    if (text.size() != 17) {
        throw std::invalid_argument("bad MAC address '" + std::string(text) +
                                    "': expected aa:bb:cc:dd:ee:ff");
    }
    for (int i = 0; i < 6; ++i) {
        const int hi = hex_value(text[3 * i]);
        const int lo = hex_value(text[3 * i + 1]);
        if (hi < 0 || lo < 0 || (i < 5 && text[3 * i + 2] != ':')) {
            throw std::invalid_argument("bad MAC address '" + std::string(text) +
                                        "': expected aa:bb:cc:dd:ee:ff");
        }
        mac.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return mac;
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1],
                  octets[2], octets[3], octets[4], octets[5]);
    return buf;
}

}  // namespace wakesim
