#include "minetrace/wasm/opcodes.hpp"

#include <string>

#include "leb.hpp"
#include "minetrace/wasm/module.hpp"

namespace minetrace::wasm {

namespace {

using detail::read_u32;

void skip(ByteView code, std::size_t& pos, std::size_t n)
{
    if (code.size() - pos < n)
        throw OpcodeDecodeError("truncated immediate");
    pos += n;
}

void skip_u32(ByteView code, std::size_t& pos)
{
    (void)read_u32<OpcodeDecodeError>(code, pos);
}

void skip_blocktype(ByteView code, std::size_t& pos)
{
    // 0x40, a value type byte, or a signed 33-bit type index
    (void)detail::read_sleb<OpcodeDecodeError>(code, pos, 33);
}

void skip_memarg(ByteView code, std::size_t& pos)
{
    const auto align = read_u32<OpcodeDecodeError>(code, pos);
    if (align & 0x40)  // multi-memory: explicit memory index
        skip_u32(code, pos);
    skip_u32(code, pos);
}

std::uint32_t decode_misc(ByteView code, std::size_t& pos)
{
    const auto sub = read_u32<OpcodeDecodeError>(code, pos);
    switch (sub) {
    case 0: case 1: case 2: case 3: case 4: case 5: case 6: case 7:
        break;  // saturating truncations
    case 8:  // memory.init
    case 10:  // memory.copy
    case 12:  // table.init
    case 14:  // table.copy
        skip_u32(code, pos);
        skip_u32(code, pos);
        break;
    case 9: case 11: case 13: case 15: case 16: case 17:
        skip_u32(code, pos);
        break;
    default:
        throw OpcodeDecodeError("unknown 0xFC sub-opcode " + std::to_string(sub));
    }
    return (misc_prefix << 8) | sub;
}

}  // namespace

std::uint32_t decode_instruction(ByteView code, std::size_t& pos)
{
    if (pos >= code.size())
        throw OpcodeDecodeError("read past end of function body");
    const std::uint8_t op = code[pos++];

    if (op >= 0x45 && op <= 0xC4)  // numeric instructions without immediates
        return op;
    if (op >= 0x28 && op <= 0x3E) {
        skip_memarg(code, pos);
        return op;
    }
    if (op >= 0x20 && op <= 0x26) {  // locals, globals, table.get/set
        skip_u32(code, pos);
        return op;
    }

    switch (op) {
    case 0x00: case 0x01: case 0x05: case 0x0B: case 0x0F: case 0x1A: case 0x1B: case 0xD1:
        return op;
    case 0x02: case 0x03: case 0x04:
        skip_blocktype(code, pos);
        return op;
    case 0x0C: case 0x0D: case 0x10: case 0x12: case 0x3F: case 0x40: case 0xD2:
        skip_u32(code, pos);
        return op;
    case 0x0E: {
        const auto n = read_u32<OpcodeDecodeError>(code, pos);
        for (std::uint64_t i = 0; i <= n; ++i)
            skip_u32(code, pos);
        return op;
    }
    case 0x11: case 0x13:
        skip_u32(code, pos);
        skip_u32(code, pos);
        return op;
    case 0x1C: {
        const auto n = read_u32<OpcodeDecodeError>(code, pos);
        skip(code, pos, n);
        return op;
    }
    case 0x41:
        (void)detail::read_sleb<OpcodeDecodeError>(code, pos, 32);
        return op;
    case 0x42:
        (void)detail::read_sleb<OpcodeDecodeError>(code, pos, 64);
        return op;
    case 0x43:
        skip(code, pos, 4);
        return op;
    case 0x44:
        skip(code, pos, 8);
        return op;
    case 0xD0:
        (void)detail::read_sleb<OpcodeDecodeError>(code, pos, 33);
        return op;
    case misc_prefix:
        return decode_misc(code, pos);
    default:
        throw OpcodeDecodeError("unknown opcode 0x" + to_hex(ByteView(&op, 1)) + " at offset " +
                                std::to_string(pos - 1));
    }
}

OpcodeClass classify_opcode(std::uint32_t opcode) noexcept
{
    if (opcode == 0x73 || opcode == 0x85)
        return OpcodeClass::xor_op;
    if ((opcode >= 0x74 && opcode <= 0x78) || (opcode >= 0x86 && opcode <= 0x8A))
        return OpcodeClass::shift;
    if (opcode >= 0x28 && opcode <= 0x35)
        return OpcodeClass::load;
    if (opcode >= 0x36 && opcode <= 0x3E)
        return OpcodeClass::store;
    return OpcodeClass::other;
}

}  // namespace minetrace::wasm
