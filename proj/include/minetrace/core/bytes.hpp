#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minetrace {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Lowercase hex encoding.
std::string to_hex(ByteView bytes);

/// Accepts upper- or lowercase; throws Error on odd length or a non-hex digit.
Bytes from_hex(std::string_view hex);

std::string base64_encode(ByteView bytes);

/// Throws Error on malformed input. Whitespace is not accepted.
Bytes base64_decode(std::string_view text);

}  // namespace minetrace
