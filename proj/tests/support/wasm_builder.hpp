#pragma once

// Test helpers that rewrite modules at the section level.

#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "minetrace/wasm/module.hpp"

namespace minetrace::testing {

inline void put_u32(Bytes& out, std::uint32_t v)
{
    do {
        std::uint8_t byte = v & 0x7F;
        v >>= 7;
        if (v != 0)
            byte |= 0x80;
        out.push_back(byte);
    } while (v != 0);
}

inline Bytes read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open fixture " + path);
    return {std::istreambuf_iterator<char>(in), {}};
}

inline Bytes wasm_fixture(const std::string& name)
{
    return read_file(std::string(MINETRACE_FIXTURE_DIR) + "/wasm/" + name + ".wasm");
}

inline Bytes encode_code_payload(const std::vector<wasm::FunctionBody>& functions)
{
    Bytes payload;
    put_u32(payload, static_cast<std::uint32_t>(functions.size()));
    for (const auto& fn : functions) {
        put_u32(payload, static_cast<std::uint32_t>(fn.locals_declaration.size() + fn.code.size()));
        payload.insert(payload.end(), fn.locals_declaration.begin(), fn.locals_declaration.end());
        payload.insert(payload.end(), fn.code.begin(), fn.code.end());
    }
    return payload;
}

/// Re-encodes the module after replacing its function bodies.
inline Bytes with_functions(const wasm::WasmModule& module, const std::vector<wasm::FunctionBody>& functions)
{
    auto copy = module;
    for (auto& s : copy.sections)
        if (s.id == wasm::code_section_id)
            s.payload = encode_code_payload(functions);
    return wasm::encode_wasm(copy);
}

/// Inserts a `nop` before the final `end` of function `which`.
inline Bytes append_nop(const wasm::WasmModule& module, std::size_t which)
{
    auto functions = module.functions;
    auto& code = functions.at(which).code;
    code.insert(code.end() - 1, 0x01);
    return with_functions(module, functions);
}

inline wasm::WasmSection random_custom_section(std::mt19937_64& rng)
{
    wasm::WasmSection s;
    s.id = wasm::custom_section_id;
    const std::string name = "junk" + std::to_string(rng() % 1000);
    put_u32(s.payload, static_cast<std::uint32_t>(name.size()));
    s.payload.insert(s.payload.end(), name.begin(), name.end());
    const auto n = rng() % 64;
    for (std::size_t i = 0; i < n; ++i)
        s.payload.push_back(static_cast<std::uint8_t>(rng()));
    return s;
}

/// A random edit that leaves the code section untouched: rewrite a data
/// segment's bytes, insert a custom section, drop a custom section, or
/// reorder two non-code sections.
inline wasm::WasmModule mutate_non_code(wasm::WasmModule module, std::mt19937_64& rng)
{
    auto& sections = module.sections;
    switch (rng() % 4) {
    case 0:
        for (auto& s : sections)
            if (s.id == 11 && s.payload.size() > 6)
                for (std::size_t i = 6; i < s.payload.size(); ++i)
                    s.payload[i] = static_cast<std::uint8_t>(rng());
        break;
    case 1: {
        const auto at = rng() % (sections.size() + 1);
        sections.insert(sections.begin() + static_cast<std::ptrdiff_t>(at), random_custom_section(rng));
        break;
    }
    case 2:
        for (auto it = sections.begin(); it != sections.end(); ++it)
            if (it->id == wasm::custom_section_id) {
                sections.erase(it);
                break;
            }
        break;
    default:
        if (sections.size() >= 2) {
            const auto a = rng() % sections.size();
            const auto b = rng() % sections.size();
            if (sections[a].id != wasm::code_section_id && sections[b].id != wasm::code_section_id &&
                sections[a].id != 2 && sections[b].id != 2)
                std::swap(sections[a], sections[b]);
        }
    }
    return module;
}

}  // namespace minetrace::testing
