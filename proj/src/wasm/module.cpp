#include "minetrace/wasm/module.hpp"

#include <array>

#include "leb.hpp"

namespace minetrace::wasm {

namespace {

constexpr std::array<std::uint8_t, 4> magic = {0x00, 0x61, 0x73, 0x6D};

using detail::read_u32;

ByteView take(ByteView data, std::size_t& pos, std::size_t n)
{
    if (data.size() - pos < n)
        throw MalformedSection("length overruns its container");
    auto out = data.subspan(pos, n);
    pos += n;
    return out;
}

std::string read_name(ByteView data, std::size_t& pos)
{
    const auto len = read_u32<MalformedSection>(data, pos);
    const auto raw = take(data, pos, len);
    return {reinterpret_cast<const char*>(raw.data()), raw.size()};
}

void skip_limits(ByteView data, std::size_t& pos)
{
    const auto flags = take(data, pos, 1)[0];
    (void)read_u32<MalformedSection>(data, pos);
    if (flags & 0x01)
        (void)read_u32<MalformedSection>(data, pos);
}

std::uint32_t count_function_imports(ByteView payload)
{
    std::size_t pos = 0;
    const auto count = read_u32<MalformedSection>(payload, pos);
    std::uint32_t functions = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        (void)read_name(payload, pos);
        (void)read_name(payload, pos);
        const auto kind = take(payload, pos, 1)[0];
        switch (kind) {
        case 0x00:  // function: type index
            (void)read_u32<MalformedSection>(payload, pos);
            ++functions;
            break;
        case 0x01:  // table: reftype + limits
            (void)take(payload, pos, 1);
            skip_limits(payload, pos);
            break;
        case 0x02:
            skip_limits(payload, pos);
            break;
        case 0x03:  // global: valtype + mutability
            (void)take(payload, pos, 2);
            break;
        case 0x04:  // tag: attribute + type index
            (void)take(payload, pos, 1);
            (void)read_u32<MalformedSection>(payload, pos);
            break;
        default:
            throw MalformedSection("unknown import kind " + std::to_string(kind));
        }
    }
    return functions;
}

std::vector<FunctionBody> decode_code_section(ByteView payload, std::uint32_t first_index)
{
    std::size_t pos = 0;
    const auto count = read_u32<MalformedSection>(payload, pos);
    std::vector<FunctionBody> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto size = read_u32<MalformedSection>(payload, pos);
        const auto body = take(payload, pos, size);

        std::size_t p = 0;
        const auto groups = read_u32<MalformedSection>(body, p);
        for (std::uint32_t g = 0; g < groups; ++g) {
            (void)read_u32<MalformedSection>(body, p);
            (void)take(body, p, 1);
        }
        FunctionBody fn;
        fn.index = first_index + i;
        fn.locals_declaration.assign(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(p));
        fn.code.assign(body.begin() + static_cast<std::ptrdiff_t>(p), body.end());
        out.push_back(std::move(fn));
    }
    if (pos != payload.size())
        throw MalformedSection("trailing bytes in code section");
    return out;
}

// Only the function-name subsection is used; a damaged name section is
// dropped rather than failing the module.
std::map<std::uint32_t, std::string> decode_names(ByteView payload, std::size_t pos)
{
    std::map<std::uint32_t, std::string> names;
    try {
        while (pos < payload.size()) {
            const auto id = take(payload, pos, 1)[0];
            const auto size = read_u32<MalformedSection>(payload, pos);
            const auto sub = take(payload, pos, size);
            if (id != 1)
                continue;
            std::size_t p = 0;
            const auto count = read_u32<MalformedSection>(sub, p);
            for (std::uint32_t i = 0; i < count; ++i) {
                const auto index = read_u32<MalformedSection>(sub, p);
                names[index] = read_name(sub, p);
            }
        }
    } catch (const MalformedSection&) {
        names.clear();
    }
    return names;
}

void write_u32(Bytes& out, std::uint32_t v)
{
    do {
        std::uint8_t byte = v & 0x7F;
        v >>= 7;
        if (v != 0)
            byte |= 0x80;
        out.push_back(byte);
    } while (v != 0);
}

}  // namespace

WasmModule parse_wasm(ByteView bytes)
{
    if (bytes.size() < magic.size() || !std::equal(magic.begin(), magic.end(), bytes.begin()))
        throw NotWasm("missing \\0asm prefix");
    if (bytes.size() < 8)
        throw MalformedSection("truncated version field");

    WasmModule module;
    module.version = static_cast<std::uint32_t>(bytes[4]) | (static_cast<std::uint32_t>(bytes[5]) << 8) |
                     (static_cast<std::uint32_t>(bytes[6]) << 16) | (static_cast<std::uint32_t>(bytes[7]) << 24);
    if (module.version != 1)
        throw UnsupportedVersion("version " + std::to_string(module.version));

    std::uint32_t imported_functions = 0;
    bool have_code = false;
    std::size_t pos = 8;
    while (pos < bytes.size()) {
        const auto id = bytes[pos++];
        const auto size = read_u32<MalformedSection>(bytes, pos);
        const auto payload = take(bytes, pos, size);
        module.sections.push_back({id, Bytes(payload.begin(), payload.end())});

        if (id == import_section_id) {
            imported_functions = count_function_imports(payload);
        } else if (id == code_section_id) {
            if (have_code)
                throw MalformedSection("duplicate code section");
            have_code = true;
            module.functions = decode_code_section(payload, imported_functions);
        } else if (id == custom_section_id) {
            std::size_t p = 0;
            if (read_name(payload, p) == "name")
                module.names = decode_names(payload, p);
        }
    }
    return module;
}

Bytes encode_wasm(const WasmModule& module)
{
    Bytes out(magic.begin(), magic.end());
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(module.version >> (8 * i)));
    for (const auto& section : module.sections) {
        out.push_back(section.id);
        write_u32(out, static_cast<std::uint32_t>(section.payload.size()));
        out.insert(out.end(), section.payload.begin(), section.payload.end());
    }
    return out;
}

}  // namespace minetrace::wasm
