#include "minetrace/core/varint.hpp"

#include "minetrace/core/error.hpp"

namespace minetrace {

void write_varint(Bytes& out, std::uint64_t value)
{
    while (value >= 0x80) {
        out.push_back(static_cast<std::uint8_t>((value & 0x7F) | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

std::size_t varint_size(std::uint64_t value) noexcept
{
    std::size_t n = 1;
    while (value >= 0x80) {
        value >>= 7;
        ++n;
    }
    return n;
}

VarintRead read_varint(ByteView input)
{
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        const std::uint8_t byte = input[i];
        const unsigned shift = 7 * static_cast<unsigned>(i);
        // the tenth byte may only carry bit 63
        if (i == 9 && (byte & 0xFE) != 0)
            throw MalformedBlob("varint exceeds 64 bits");
        value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0) {
            if (byte == 0 && i > 0)
                throw MalformedBlob("non-canonical varint");
            return {value, i + 1};
        }
    }
    throw MalformedBlob("truncated varint");
}

}  // namespace minetrace
