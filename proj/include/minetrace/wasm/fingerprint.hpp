#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "minetrace/core/hash_digest.hpp"
#include "minetrace/wasm/module.hpp"

namespace minetrace::wasm {

struct WasmSignature {
    HashDigest digest;

    std::string hex() const { return digest.hex(); }
    bool operator==(const WasmSignature&) const = default;
};

/// SHA-256 over (locals_declaration || code) of every function in
/// code-section order, without size prefixes.
WasmSignature signature(const WasmModule& module);

struct FeatureVector {
    std::uint64_t xor_count = 0;
    std::uint64_t shift_count = 0;
    std::uint64_t load_count = 0;
    std::uint64_t store_count = 0;
    std::uint64_t function_count = 0;
    std::uint64_t total_instruction_count = 0;  // every opcode, including `end`
    std::vector<std::string> name_hints;

    bool operator==(const FeatureVector&) const = default;
};

const std::vector<std::string>& default_name_keywords();

/// Single pass over all function bodies. Name hints are the name-section
/// entries containing any keyword, compared case-insensitively, in
/// function-index order. Throws OpcodeDecodeError.
FeatureVector features(const WasmModule& module,
                       std::span<const std::string> keywords = default_name_keywords());

}  // namespace minetrace::wasm
