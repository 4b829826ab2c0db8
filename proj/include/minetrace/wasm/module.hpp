#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "minetrace/core/bytes.hpp"
#include "minetrace/core/error.hpp"

namespace minetrace::wasm {

MINETRACE_DEFINE_ERROR(NotWasm);
MINETRACE_DEFINE_ERROR(MalformedSection);
MINETRACE_DEFINE_ERROR(UnsupportedVersion);
MINETRACE_DEFINE_ERROR(OpcodeDecodeError);

inline constexpr std::uint8_t custom_section_id = 0;
inline constexpr std::uint8_t import_section_id = 2;
inline constexpr std::uint8_t code_section_id = 10;

struct WasmSection {
    std::uint8_t id = 0;
    Bytes payload;

    bool operator==(const WasmSection&) const = default;
};

/// One entry of the code section, split into its locals vector and the
/// instruction bytes (including the final `end`). Both are exact spans of
/// the input.
struct FunctionBody {
    std::uint32_t index = 0;  // in the function index space, after imports
    Bytes locals_declaration;
    Bytes code;
};

struct WasmModule {
    std::uint32_t version = 1;
    std::vector<WasmSection> sections;  // in file order, unknown ids kept opaque
    std::vector<FunctionBody> functions;  // code-section order
    std::map<std::uint32_t, std::string> names;  // from the "name" custom section
};

/// Throws NotWasm, UnsupportedVersion or MalformedSection.
WasmModule parse_wasm(ByteView bytes);

/// Reassembles a module from its sections. Used by tools that mutate
/// non-code sections.
Bytes encode_wasm(const WasmModule& module);

}  // namespace minetrace::wasm
