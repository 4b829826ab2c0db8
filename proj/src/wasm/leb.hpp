#pragma once

// LEB128 readers for the Wasm binary format. Unlike the blob varints these
// accept padded (non-canonical) encodings, which the format allows.

#include <cstdint>

#include "minetrace/core/bytes.hpp"

namespace minetrace::wasm::detail {

template <class Error>
std::uint64_t read_uleb(ByteView data, std::size_t& pos, unsigned max_bits)
{
    std::uint64_t result = 0;
    unsigned shift = 0;
    while (true) {
        if (pos >= data.size())
            throw Error("truncated LEB128");
        const std::uint8_t byte = data[pos++];
        if (shift >= max_bits)
            throw Error("LEB128 too long");
        result |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
        shift += 7;
        if ((byte & 0x80) == 0)
            break;
    }
    if (max_bits < 64 && (result >> max_bits) != 0)
        throw Error("LEB128 value out of range");
    return result;
}

template <class Error>
std::int64_t read_sleb(ByteView data, std::size_t& pos, unsigned max_bits)
{
    std::int64_t result = 0;
    unsigned shift = 0;
    std::uint8_t byte = 0;
    do {
        if (pos >= data.size())
            throw Error("truncated LEB128");
        if (shift >= max_bits + 6)
            throw Error("LEB128 too long");
        byte = data[pos++];
        if (shift < 64)
            result |= static_cast<std::int64_t>(static_cast<std::uint64_t>(byte & 0x7F) << shift);
        shift += 7;
    } while (byte & 0x80);
    if (shift < 64 && (byte & 0x40))
        result |= static_cast<std::int64_t>(~std::uint64_t{0} << shift);
    return result;
}

template <class Error>
std::uint32_t read_u32(ByteView data, std::size_t& pos)
{
    return static_cast<std::uint32_t>(read_uleb<Error>(data, pos, 32));
}

}  // namespace minetrace::wasm::detail
