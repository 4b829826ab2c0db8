#pragma once

#include <cstdint>

#include "minetrace/core/bytes.hpp"

namespace minetrace::wasm {

enum class OpcodeClass {
    xor_op,
    shift,  // shl, shr_s, shr_u, rotl, rotr at both widths
    load,   // every typed memory load including the extending forms
    store,
    other,
};

/// Prefixed (0xFC) instructions are reported as 0xFC00 | sub-opcode.
inline constexpr std::uint32_t misc_prefix = 0xFC;

/// Decodes the instruction at `pos`, moves `pos` past its immediates and
/// returns the opcode. Throws OpcodeDecodeError for opcodes outside the
/// supported set (MVP, sign extension, 0xFC misc, reference types, tail
/// calls) and for truncated immediates.
std::uint32_t decode_instruction(ByteView code, std::size_t& pos);

OpcodeClass classify_opcode(std::uint32_t opcode) noexcept;

}  // namespace minetrace::wasm
