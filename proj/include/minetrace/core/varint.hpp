#pragma once

#include <cstdint>

#include "minetrace/core/bytes.hpp"

namespace minetrace {

/// Appends the canonical LEB128 encoding of value (7 bits per byte, low group first).
void write_varint(Bytes& out, std::uint64_t value);

std::size_t varint_size(std::uint64_t value) noexcept;

struct VarintRead {
    std::uint64_t value;
    std::size_t length;
};

/// Decodes one varint from the front of input. Throws MalformedBlob on
/// truncation, values wider than 64 bits, or non-canonical encodings.
VarintRead read_varint(ByteView input);

}  // namespace minetrace
