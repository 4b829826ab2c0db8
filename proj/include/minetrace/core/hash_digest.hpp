#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "minetrace/core/bytes.hpp"

namespace minetrace {

struct HashDigest {
    static constexpr std::size_t size = 32;

    std::array<std::uint8_t, size> bytes{};

    std::string hex() const { return to_hex(bytes); }
    ByteView view() const noexcept { return bytes; }

    /// Requires exactly 64 hex digits.
    static HashDigest from_hex(std::string_view hex);
    static HashDigest from_bytes(ByteView raw);

    auto operator<=>(const HashDigest&) const = default;
};

struct HashDigestHash {
    std::size_t operator()(const HashDigest& d) const noexcept
    {
        std::size_t h = 0;
        for (std::size_t i = 0; i < sizeof(std::size_t); ++i)
            h = (h << 8) | d.bytes[i];
        return h;
    }
};

}  // namespace minetrace
